// moments.hpp - exact and numerical moments of S_c = sum_i (y_i e^{Sigma s})^c,
// where y_i are the squared singular values of the length-T factor product.
//
// With the rational prefactor and per-factor transforms
//
//   f(u) = prod_{l=1}^{n} (u+l-1)/(u+c+l-1) * prod_{tau<=T} F_tau(u),
//
//   finite L : F(u) = e^{c H_{L-n}} prod_{k=1}^{L-n} (u+c-k)/(u-k)
//   L = inf  : F(u) = e^{c gamma_E} Gamma(1-u) / Gamma(1-u-c)
//   (the unshifted variant replaces e^{c H_{L-n}} by L^c and drops e^{c gamma_E})
//
// the first two moments are
//
//   E[S_c]   = (-1/c) (2 pi i)^{-1} oint f(u) du
//            = sum_{l=1}^{n} [ prod_{h != l} (h-l-c)/(h-l) ] prod_tau F_tau(-c-l+1)
//   Var[S_c] = (2 pi i)^{-2} oint oint f(u1) f(u2) / ((u2-u1)^2 - c^2) du1 du2
//
// where the single contour encloses exactly the poles u = -c-l+1, l = 1..n,
// and the variance pair must nest with gap wider than c.
//
// Contour family: circles centered at x0 = -c - (n-1)/2.  The m = 1 radius
// is (n-1)/2 + 1/2; the variance radii are (n-1)/2 + 1/4 and (n-1)/2 + 3/5,
// which nest correctly iff c < 0.35.  Every pole -c-l+1 lies inside each
// circle and every integrand pole at a positive integer lies outside.  The
// trapezoid rule on a circle converges exponentially for integrands analytic
// near the contour; nodes double until successive values agree to 1e-10
// (cap 2^14), and the Richardson gap is reported as the error estimate.
// Quadrature runs in complex arithmetic; a final imaginary part above 1e-8
// trips numeric_failure since the true values are real.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "picketlab/ensemble.hpp"
#include "picketlab/rng.hpp"

namespace picketlab {

// Requested contours cannot be placed (variance nesting needs c < 0.35).
struct contour_infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric invariant failed mid-computation (e.g. imaginary residue).
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MomentQuery {
    int n = 1;
    std::vector<Entry> prefix;  // explicit factor sizes, length T
    double c = 1.0;             // exponent; both exponents equal c when m = 2
    int m = 1;                  // 1 (mean) or 2 (variance kernel)
    bool shifted = true;        // include the e^{c Sigma s_n(L_tau)} factor
};

enum class MomentMethod { residue, quadrature, monte_carlo };

struct MomentResult {
    double value = 0.0;
    MomentMethod method = MomentMethod::residue;
    double error_estimate = 0.0;
};

// Throws std::domain_error / std::invalid_argument / contour_infeasible on
// any precondition violation.
void validate(const MomentQuery& query);

// e^{c gamma_E} Gamma(1-u)/Gamma(1-u-c), the F-factor limit of an infinite
// product over k; c > 0, u not a positive integer (pole), else
// std::domain_error.
std::complex<double> infinite_factor(std::complex<double> u, double c);

// Exact residue evaluation of E[S_c]; requires m = 1.
MomentResult residue_moment_m1(const MomentQuery& query);

// Trapezoid quadrature starting from `nodes` nodes per circle (>= 8); m = 1
// reproduces residue_moment_m1, m = 2 evaluates the variance integral.
MomentResult contour_moment(const MomentQuery& query, int nodes);

// Variance of S_c for the pattern cycled to length T and c = c_hat/T.
MomentResult variance_m2(int n, const std::vector<Entry>& pattern, double c_hat,
                         long long T, int nodes = 128);

// Monte Carlo estimate of E[S_c] via the exact small-T product path; the
// result carries a standard error.  Requires m = 1 and prefix length <= 200.
MomentResult mc_moment(const MomentQuery& query, long long trials, RngStream base);

struct VarianceEstimate {
    double variance = 0.0;
    double stderr_variance = 0.0;
};

// Monte Carlo companion to variance_m2 (same pattern/c_hat/T conventions).
VarianceEstimate mc_variance(int n, const std::vector<Entry>& pattern, double c_hat,
                             long long T, long long trials, RngStream base);

namespace detail {

// log F(u) for one factor entry (see header comment for both variants).
std::complex<double> log_factor(Entry entry, int n, double c, std::complex<double> u,
                                bool shifted);

// m = 1 quadrature at a fixed node count with the circle radius offset by
// `radius_offset` from its default; exposed for the analyticity property
// (the value must not depend on admissible radius perturbations).
std::complex<double> contour_m1_raw(const MomentQuery& query, int nodes,
                                    double radius_offset);

// Variance double-contour sum at fixed node count; `cross_kernel` = false
// replaces the kernel by 0, which must yield exactly 0.
std::complex<double> variance_raw(int n, const std::vector<std::pair<Entry, long long>>& groups,
                                  double c, bool shifted, int nodes, bool cross_kernel);

}  // namespace detail

}  // namespace picketlab
