#include "picketlab/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "picketlab/special_functions.hpp"

namespace picketlab {

namespace {

void check_index(int n, int i, const char* where) {
    if (n < 1)
        throw std::domain_error(std::string(where) + ": n must be >= 1");
    if (i < 1 || i > n)
        throw std::domain_error(std::string(where) + ": i must satisfy 1 <= i <= n");
}

void check_mass(const FrequencyMeasure& measure, const char* where) {
    double total = measure.weight_at_infinity();
    for (const auto& [k, w] : measure.atoms())
        total += w;
    if (!(total > 0.0))
        throw std::domain_error(std::string(where) + ": measure has zero total mass");
}

double lambda_i(const FrequencyMeasure& measure, int n, int i) {
    const long long K = measure.max_finite_support() + 1;
    double finite_part = 0.0;
    for (long long k = K - 1; k >= 1; --k) {
        const double dk = static_cast<double>(k);
        finite_part += measure.tail_weight(k) *
                       (std::log1p(-1.0 / (dk + n)) + 1.0 / (dk + n - i));
    }
    const double rho_inf = measure.weight_at_infinity();
    // sum_{k>=K} (log(1-1/(k+n)) + 1/(k+n-i)) telescopes against the digamma
    // recurrence: partial sums to M equal log(K+n-1) - log(M+n) +
    // psi(M+n-i+1) - psi(K+n-i), and the M terms cancel in the limit.
    const double tail =
        rho_inf == 0.0
            ? 0.0
            : rho_inf * (std::log(static_cast<double>(K + n - 1)) -
                         digamma(static_cast<double>(K + n - i)));
    return -(finite_part + tail);
}

}  // namespace

std::vector<double> lambda(const FrequencyMeasure& measure, int n) {
    if (n < 1)
        throw std::domain_error("lambda: n must be >= 1");
    check_mass(measure, "lambda");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        out[static_cast<std::size_t>(i - 1)] = lambda_i(measure, n, i);
    return out;
}

double c_of_n(const FrequencyMeasure& measure, int n) {
    if (n < 1)
        throw std::domain_error("c_of_n: n must be >= 1");
    check_mass(measure, "c_of_n");
    const long long K = measure.max_finite_support() + 1;
    double finite_part = 0.0;
    for (long long k = K - 1; k >= 1; --k) {
        const double shifted = static_cast<double>(k + n - 1);
        finite_part += measure.tail_weight(k) / (shifted * shifted);
    }
    const double rho_inf = measure.weight_at_infinity();
    const double tail =
        rho_inf == 0.0 ? 0.0 : rho_inf * trigamma(static_cast<double>(K + n - 1));
    return finite_part + tail;
}

std::vector<double> normalized_gaps(const FrequencyMeasure& measure, int n) {
    const std::vector<double> lam = lambda(measure, n);
    const double c = c_of_n(measure, n);
    std::vector<double> gaps(lam.size());
    gaps[0] = 0.0;
    for (std::size_t i = 1; i < lam.size(); ++i)
        gaps[i] = (lam[i] - lam[0]) / c;
    return gaps;
}

double epsilon_bound(const FrequencyMeasure& measure, int n, int i) {
    check_index(n, i, "epsilon_bound");
    const double excess = static_cast<double>(i - 1);
    return excess * excess / static_cast<double>(n - i + 1) * c_of_n(measure, n);
}

double laplace_identity_value(const FrequencyMeasure& measure, int n, int i) {
    check_index(n, i, "laplace_identity_value");
    check_mass(measure, "laplace_identity_value");
    if (i == n)
        return 0.0;  // the summand 1/k - 1/(k+n-i) vanishes identically
    const long long K = measure.max_finite_support() + 1;
    double finite_part = 0.0;
    for (long long k = K - 1; k >= 1; --k) {
        const double dk = static_cast<double>(k);
        finite_part += measure.tail_weight(k) * (1.0 / dk - 1.0 / (dk + n - i));
    }
    const double rho_inf = measure.weight_at_infinity();
    const double tail =
        rho_inf == 0.0
            ? 0.0
            : rho_inf * (digamma(static_cast<double>(K + n - i)) -
                         digamma(static_cast<double>(K)));
    return finite_part + tail;
}

LyapunovSpectrum limit_spectrum(const FrequencyMeasure& measure, int n) {
    LyapunovSpectrum s;
    s.n = n;
    s.lambda = lambda(measure, n);
    s.c_n = c_of_n(measure, n);
    s.normalized_gaps.resize(s.lambda.size());
    s.epsilon_bounds.resize(s.lambda.size());
    s.normalized_gaps[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        if (i > 1)
            s.normalized_gaps[static_cast<std::size_t>(i - 1)] =
                (s.lambda[static_cast<std::size_t>(i - 1)] - s.lambda[0]) / s.c_n;
        const double excess = static_cast<double>(i - 1);
        s.epsilon_bounds[static_cast<std::size_t>(i - 1)] =
            excess * excess / static_cast<double>(n - i + 1) * s.c_n;
    }
    return s;
}

}  // namespace picketlab
