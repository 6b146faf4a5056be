#include "picketlab/ensemble.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "picketlab/special_functions.hpp"

namespace picketlab {

Entry Entry::finite(long long L) {
    if (L < 1)
        throw std::invalid_argument("Entry::finite: L must be a positive integer");
    return Entry{L, false};
}

std::vector<Entry> parse_pattern(std::string_view text) {
    std::vector<Entry> pattern;
    std::size_t pos = 0;
    const auto fail = [&](std::size_t at, const std::string& what) {
        throw std::invalid_argument("pattern parse error at position " +
                                    std::to_string(at) + ": " + what);
    };
    while (true) {
        const std::size_t start = pos;
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view token = text.substr(start, end - start);
        if (token.empty())
            fail(start, "empty entry");
        if (token == "inf") {
            pattern.push_back(Entry::infinity());
        } else {
            long long value = 0;
            for (std::size_t i = 0; i < token.size(); ++i) {
                const char ch = token[i];
                if (!std::isdigit(static_cast<unsigned char>(ch)))
                    fail(start + i, "expected a positive integer or \"inf\"");
                if (value > (std::numeric_limits<long long>::max() - 9) / 10)
                    fail(start, "integer entry out of range");
                value = 10 * value + (ch - '0');
            }
            if (value < 1)
                fail(start, "integer entry must be positive");
            pattern.push_back(Entry::finite(value));
        }
        if (end == text.size())
            break;
        pos = end + 1;
        if (pos == text.size())
            fail(pos, "empty entry");
    }
    return pattern;
}

std::string format_pattern(const std::vector<Entry>& pattern) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (i > 0)
            out += ',';
        out += pattern[i].infinite ? "inf" : std::to_string(pattern[i].value);
    }
    return out;
}

FrequencyMeasure::FrequencyMeasure(std::map<long long, double> atoms,
                                   double weight_at_infinity)
    : weight_at_infinity_(weight_at_infinity) {
    if (!(weight_at_infinity >= 0.0))
        throw std::invalid_argument("FrequencyMeasure: weight at infinity must be >= 0");
    double total = weight_at_infinity;
    for (const auto& [k, w] : atoms) {
        if (k < 1)
            throw std::invalid_argument("FrequencyMeasure: support points must be >= 1");
        if (!(w >= 0.0))
            throw std::invalid_argument("FrequencyMeasure: atom weights must be >= 0");
        if (w > 0.0)
            atoms_.emplace(k, w);
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("FrequencyMeasure: total mass must equal 1 within 1e-12");
}

FrequencyMeasure FrequencyMeasure::ginibre_only() {
    return FrequencyMeasure({}, 1.0);
}

long long FrequencyMeasure::max_finite_support() const {
    return atoms_.empty() ? 0 : atoms_.rbegin()->first;
}

double FrequencyMeasure::tail_weight(long long k) const {
    if (k < 1)
        throw std::domain_error("tail_weight: k must be >= 1");
    double tail = weight_at_infinity_;
    for (auto it = atoms_.lower_bound(k); it != atoms_.end(); ++it)
        tail += it->second;
    return tail;
}

nlohmann::json to_json(const FrequencyMeasure& measure) {
    nlohmann::json atoms = nlohmann::json::object();
    for (const auto& [k, w] : measure.atoms())
        atoms[std::to_string(k)] = w;
    return nlohmann::json{{"atoms", atoms}, {"infinity", measure.weight_at_infinity()}};
}

FrequencyMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j.contains("infinity"))
        throw std::invalid_argument("measure_from_json: expected {\"atoms\": {...}, \"infinity\": w}");
    std::map<long long, double> atoms;
    for (const auto& [key, value] : j.at("atoms").items()) {
        std::size_t used = 0;
        const long long k = std::stoll(key, &used);
        if (used != key.size())
            throw std::invalid_argument("measure_from_json: bad support point \"" + key + "\"");
        atoms[k] = value.get<double>();
    }
    return FrequencyMeasure(std::move(atoms), j.at("infinity").get<double>());
}

EnsembleSequence::EnsembleSequence(int n, std::vector<Entry> pattern)
    : n_(n), pattern_(std::move(pattern)) {
    if (n < 1)
        throw std::domain_error("EnsembleSequence: n must be >= 1");
    if (pattern_.empty())
        throw std::invalid_argument("EnsembleSequence: pattern must be nonempty");
    for (const Entry& e : pattern_)
        if (!e.infinite && e.value <= n)
            throw std::invalid_argument("EnsembleSequence: finite entry " +
                                        std::to_string(e.value) +
                                        " must exceed n = " + std::to_string(n));
}

Entry EnsembleSequence::at(long long tau) const {
    if (tau < 1)
        throw std::domain_error("EnsembleSequence::at: tau must be >= 1");
    return pattern_[static_cast<std::size_t>((tau - 1) % period())];
}

std::vector<Entry> EnsembleSequence::prefix(long long T) const {
    if (T < 1)
        throw std::domain_error("EnsembleSequence::prefix: T must be >= 1");
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>(T));
    for (long long tau = 1; tau <= T; ++tau)
        out.push_back(at(tau));
    return out;
}

FrequencyMeasure EnsembleSequence::frequency_measure() const {
    const long long P = period();
    std::map<long long, long long> counts;
    long long infinite_count = 0;
    for (const Entry& e : pattern_) {
        if (e.infinite)
            ++infinite_count;
        else
            ++counts[e.value - n_];
    }
    std::map<long long, double> atoms;
    for (const auto& [gap, count] : counts)
        atoms[gap] = static_cast<double>(count) / static_cast<double>(P);
    return FrequencyMeasure(std::move(atoms),
                            static_cast<double>(infinite_count) / static_cast<double>(P));
}

Rational EnsembleSequence::empirical_tail(long long k, long long T) const {
    if (k < 1)
        throw std::domain_error("empirical_tail: k must be >= 1");
    if (T < 1)
        throw std::domain_error("empirical_tail: T must be >= 1");
    // Count over full periods plus the remainder prefix; gap >= k means
    // an infinite entry or L - n >= k.
    const long long P = period();
    long long per_period = 0;
    for (const Entry& e : pattern_)
        if (e.infinite || e.value - n_ >= k)
            ++per_period;
    long long count = (T / P) * per_period;
    for (long long tau = (T / P) * P + 1; tau <= T; ++tau) {
        const Entry e = at(tau);
        if (e.infinite || e.value - n_ >= k)
            ++count;
    }
    return Rational(count, T);
}

EmpiricalFrequency empirical_frequency(const EnsembleSequence& seq, long long k, long long T) {
    return EmpiricalFrequency{k, T, seq.empirical_tail(k, T)};
}

double shift_s(int n, Entry L) {
    if (n < 1)
        throw std::domain_error("shift_s: n must be >= 1");
    if (L.infinite)
        return euler_gamma;
    if (L.value <= n)
        throw std::domain_error("shift_s: finite L must exceed n");
    return harmonic(L.value - n) - std::log(static_cast<double>(L.value));
}

double alpha(const FrequencyMeasure& measure, int n) {
    if (n < 1)
        throw std::domain_error("alpha: n must be >= 1");
    const long long K = measure.max_finite_support() + 1;
    double finite_part = 0.0;
    for (long long k = K - 1; k >= 1; --k) {
        const double dk = static_cast<double>(k);
        finite_part += measure.tail_weight(k) * (1.0 / dk + std::log1p(-1.0 / (dk + n)));
    }
    const double rho_inf = measure.weight_at_infinity();
    const double tail =
        rho_inf == 0.0
            ? 0.0
            : rho_inf * (std::log(static_cast<double>(K + n - 1)) - digamma(static_cast<double>(K)));
    return finite_part + tail;
}

}  // namespace picketlab
