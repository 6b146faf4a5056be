// special_functions.hpp - digamma, trigamma, harmonic numbers, complex log-gamma.
//
// Every series tail evaluated elsewhere in the library reduces to psi or psi'
// at a shifted integer argument, and the L = infinity moment factor is a ratio
// of gamma functions at complex argument:
//
//   psi(x)  = d/dx log Gamma(x)          psi'(x) = d/dx psi(x)
//   H_m     = sum_{j<=m} 1/j = psi(m+1) + gamma_E
//
// Real psi and psi' push the argument to x >= 12 with the recurrences
//   psi(x) = psi(x+1) - 1/x,   psi'(x) = psi'(x+1) + 1/x^2
// and then use the asymptotic Bernoulli series through 1/x^14 resp. 1/x^15;
// absolute error stays below 1e-13 on x > 0.  log_gamma is the Lanczos
// approximation (g = 7, 9 coefficients) with the reflection formula taking
// over at Re z < 1/2.

#pragma once

#include <complex>

namespace picketlab {

// Euler-Mascheroni constant gamma_E = lim_{m} (H_m - log m).
inline constexpr double euler_gamma = 0.5772156649015328606065120900824024;

// psi(x) for x > 0; throws std::domain_error otherwise.
double digamma(double x);

// psi'(x) for x > 0; throws std::domain_error otherwise.
double trigamma(double x);

// H_m with H_0 = 0; exact summation for small m, psi(m+1) + gamma_E beyond.
// Throws std::domain_error for m < 0.
double harmonic(long long m);

// Principal-branch log Gamma(z); diverges at the poles z = 0, -1, -2, ...
std::complex<double> log_gamma(std::complex<double> z);

}  // namespace picketlab
