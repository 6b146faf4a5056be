#include "picketlab/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace picketlab {

double digamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) = log x - 1/(2x) - sum_{k>=1} B_{2k}/(2k x^{2k})
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double bernoulli =
        1.0 / 12.0 -
        inv2 * (1.0 / 120.0 -
                inv2 * (1.0 / 252.0 -
                        inv2 * (1.0 / 240.0 -
                                inv2 * (1.0 / 132.0 -
                                        inv2 * (691.0 / 32760.0 -
                                                inv2 * (1.0 / 12.0))))));
    return acc + std::log(x) - 0.5 * inv - inv2 * bernoulli;
}

double trigamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("trigamma: argument must be positive");
    double acc = 0.0;
    while (x < 12.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // psi'(x) = 1/x + 1/(2x^2) + sum_{k>=1} B_{2k}/x^{2k+1}
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 +
               inv * (0.5 +
                      inv * (1.0 / 6.0 -
                             inv2 * (1.0 / 30.0 -
                                     inv2 * (1.0 / 42.0 -
                                             inv2 * (1.0 / 30.0 -
                                                     inv2 * (5.0 / 66.0 -
                                                             inv2 * (691.0 / 2730.0 -
                                                                     inv2 * (7.0 / 6.0)))))))));
    return acc + series;
}

double harmonic(long long m) {
    if (m < 0)
        throw std::domain_error("harmonic: index must be nonnegative");
    if (m <= 64) {
        double h = 0.0;
        for (long long j = 1; j <= m; ++j)
            h += 1.0 / static_cast<double>(j);
        return h;
    }
    return digamma(static_cast<double>(m) + 1.0) + euler_gamma;
}

std::complex<double> log_gamma(std::complex<double> z) {
    using std::numbers::pi;
    static constexpr double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (z.real() < 0.5) {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1-z)
        return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    const std::complex<double> w = z - 1.0;
    std::complex<double> sum = coef[0];
    for (int i = 1; i < 9; ++i)
        sum += coef[i] / (w + static_cast<double>(i));
    const std::complex<double> t = w + 7.5;  // w + g + 1/2
    return 0.5 * std::log(2.0 * pi) + (w + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace picketlab
