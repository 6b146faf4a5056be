// spectrum.hpp - closed-form limit spectrum.
//
//   lambda_i(n) = -sum_{k>=1} A_k ( log(1 - 1/(k+n)) + 1/(k+n-i) )
//   c(n)        =  sum_{k>=1} A_k / (k+n-1)^2
//   gap_i       =  (lambda_i - lambda_1) / c(n)   ->  -(i-1)  as n grows
//
// with the finite-n correction eps_i = c(n) * (gap_i + (i-1)) obeying
// |eps_i| <= ((i-1)^2 / (n-i+1)) * c(n).
//
// A_k is constant (= rho_inf) for k >= K where K = (max finite support) + 1,
// so every tail is exact:
//
//   lambda_i tail : rho_inf * (log(K+n-1) - psi(K+n-i)), inside the minus
//   c(n) tail     : rho_inf * psi'(K+n-1)
//   Laplace tail  : rho_inf * (psi(K+n-i) - psi(K))
//                   for sum_k A_k (1/k - 1/(k+n-i)), the right-hand side of
//                   the identity lambda_i + alpha = sum_k A_k (1/k - 1/(k+n-i)).
//
// K is fixed at (max finite support) + 1; no truncation knob exists because
// the tails are closed-form.

#pragma once

#include <vector>

#include "picketlab/ensemble.hpp"

namespace picketlab {

struct LyapunovSpectrum {
    int n = 0;
    std::vector<double> lambda;           // sorted strictly descending
    double c_n = 0.0;
    std::vector<double> normalized_gaps;  // (lambda_i - lambda_1)/c_n; first entry 0
    std::vector<double> epsilon_bounds;   // ((i-1)^2/(n-i+1)) * c_n
};

// lambda_1 >= ... >= lambda_n, absolute accuracy 1e-10.
std::vector<double> lambda(const FrequencyMeasure& measure, int n);

// c(n) > 0, absolute accuracy 1e-12.
double c_of_n(const FrequencyMeasure& measure, int n);

// (lambda_i - lambda_1)/c(n); the first entry is exactly 0.
std::vector<double> normalized_gaps(const FrequencyMeasure& measure, int n);

// ((i-1)^2/(n-i+1)) * c(n); requires 1 <= i <= n, else std::domain_error.
double epsilon_bound(const FrequencyMeasure& measure, int n, int i);

// sum_k A_k (1/k - 1/(k+n-i)), the Laplace-transform value equal to
// lambda_i + alpha; requires 1 <= i <= n.
double laplace_identity_value(const FrequencyMeasure& measure, int n, int i);

// All of the above bundled; lambda and c(n) are computed once.
LyapunovSpectrum limit_spectrum(const FrequencyMeasure& measure, int n);

}  // namespace picketlab
