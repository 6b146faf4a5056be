// ensemble.hpp - factor-size sequences, frequency measures, shift constants.
//
// A product chain is parameterized by a sequence (L_tau)_{tau>=1} whose
// entries are either a finite integer L > n or infinity (the Ginibre case).
// Sequences are given as a finite pattern repeated cyclically.  The gaps
// L_tau - n induce a probability measure rho on {1, 2, ...} U {infinity};
// everything evaluated downstream depends on rho only through its tails
//
//   A_k = rho([k, infinity]),   k = 1, 2, ...
//
// which are nonincreasing in k and constant (= the weight at infinity) once
// k exceeds the largest finite support point.  Cyclic patterns make every
// atom an exact rational count/period.
//
// Normalization constants:
//
//   s_n(L)  = H_{L-n} - log L   (finite L),      s_n(inf) = gamma_E
//   alpha   = sum_{k>=1} A_k (1/k + log(1 - 1/(k+n)))
//
// alpha's constant-weight tail beyond K = (max finite support) + 1 is summed
// in closed form,
//
//   sum_{k>=K} (1/k + log(1 - 1/(k+n))) = log(K+n-1) - psi(K),
//
// which follows by telescoping the log term and psi(M+1) - log(M+n) -> 0.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>
#include "json.hpp"

namespace picketlab {

using Rational = boost::rational<long long>;

// One factor-size entry: a finite L or infinity.
struct Entry {
    long long value = 0;    // finite L; meaningful only when !infinite
    bool infinite = false;

    static Entry finite(long long L);
    static constexpr Entry infinity() { return Entry{0, true}; }

    friend bool operator==(const Entry&, const Entry&) = default;
    friend auto operator<=>(const Entry&, const Entry&) = default;
};

// Parses "entry(,entry)*" with entry := positive-integer | "inf".
// Throws std::invalid_argument naming the byte position of the bad token.
std::vector<Entry> parse_pattern(std::string_view text);
std::string format_pattern(const std::vector<Entry>& pattern);

// Probability measure on {1, 2, ...} U {infinity} with finite support.
class FrequencyMeasure {
public:
    // Validates: keys >= 1, weights >= 0, total mass within 1e-12 of 1.
    // Zero-weight atoms are dropped.  Throws std::invalid_argument.
    FrequencyMeasure(std::map<long long, double> atoms, double weight_at_infinity);

    static FrequencyMeasure ginibre_only();

    const std::map<long long, double>& atoms() const { return atoms_; }
    double weight_at_infinity() const { return weight_at_infinity_; }

    // Largest finite support point; 0 when there are no finite atoms.
    long long max_finite_support() const;

    // A_k = rho([k, infinity]); k >= 1, else std::domain_error.
    double tail_weight(long long k) const;

    friend bool operator==(const FrequencyMeasure&, const FrequencyMeasure&) = default;

private:
    std::map<long long, double> atoms_;
    double weight_at_infinity_ = 0.0;
};

// Serialization as {"atoms": {"3": 0.5}, "infinity": 0.5}.
nlohmann::json to_json(const FrequencyMeasure& measure);
FrequencyMeasure measure_from_json(const nlohmann::json& j);

// The sequence (L_tau): a pattern repeated cyclically, together with the
// dimension n it will be used at.  Finite entries must exceed n.
class EnsembleSequence {
public:
    EnsembleSequence(int n, std::vector<Entry> pattern);

    int n() const { return n_; }
    const std::vector<Entry>& pattern() const { return pattern_; }
    long long period() const { return static_cast<long long>(pattern_.size()); }

    // L_tau, 1-based and cyclic.
    Entry at(long long tau) const;
    std::vector<Entry> prefix(long long T) const;

    // Exact rational frequency measure of the gaps L_tau - n over one period,
    // rounded to double weights.
    FrequencyMeasure frequency_measure() const;

    // rho_{n,T}([k, infinity]) = #{tau <= T : L_tau - n >= k} / T, exact.
    Rational empirical_tail(long long k, long long T) const;

private:
    int n_ = 0;
    std::vector<Entry> pattern_;
};

struct EmpiricalFrequency {
    long long k = 0;
    long long T = 0;
    Rational value;
};

EmpiricalFrequency empirical_frequency(const EnsembleSequence& seq, long long k, long long T);

// s_n(L) = H_{L-n} - log L for finite L, gamma_E at infinity.
// Throws std::domain_error when a finite L does not exceed n.
double shift_s(int n, Entry L);

// alpha = sum_k A_k (1/k + log(1 - 1/(k+n))); finite part summed directly,
// constant tail in closed form.  Absolute accuracy 1e-10.
double alpha(const FrequencyMeasure& measure, int n);

}  // namespace picketlab
