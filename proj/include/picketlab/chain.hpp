// chain.hpp - stable log squared singular values of long matrix products.
//
// Benettin QR sweep: keep an orthonormal frame alongside per-direction log
// accumulators.  Each step absorbs one factor through the QR factorization
// of X * frame (R-diagonal phase-fixed real positive), adds log R_ii to
// log_scales, and replaces the frame by Q.  Only logarithms accumulate, so
// the sweep cannot overflow at any T, and
//
//   (2 / T) * log_scales  ->  the log squared-singular-value growth rates.
//
// Directions need not emerge ordered at finite T; they are sorted descending
// before reporting.  Summing log R_ii over directions reproduces
// sum_tau log|det X_tau| exactly, which is the cheap integrity check used by
// the test suite.
//
// exact_log_squared_singular_values is the small-T reference path: the
// product is maintained as U * diag(e^d) * (unitary right factor, dropped
// since it cannot change singular values).  Each factor multiplies U and the
// columns are re-orthogonalized by one-sided Jacobi rotations evaluated in
// the scaled representation, so every log scale in d keeps full relative
// accuracy no matter how steep the column grading becomes.  Valid for
// T <= 200.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "picketlab/ensemble.hpp"
#include "picketlab/sampler.hpp"

namespace picketlab {

struct ChainState {
    int n = 0;
    long long tau = 0;           // factors absorbed so far
    ComplexMatrix frame;         // n x n, orthonormal columns
    Eigen::VectorXd log_scales;  // accumulated log R_ii per direction
    double shift_sum = 0.0;      // sum_{tau' <= tau} s_n(L_tau')
    std::vector<double> step_log;  // per-step log R_ii increments, n per step
};

// Identity frame, zero accumulators; n >= 1, else std::domain_error.
ChainState chain_init(int n);

// Absorbs one factor X drawn with size entry L.  Throws std::invalid_argument
// on shape/finiteness violations and std::runtime_error naming the offending
// tau when X is singular to machine precision.
void chain_step(ChainState& state, const ComplexMatrix& X, Entry L);

struct LyapunovEstimate {
    std::vector<double> values;   // (2/T) log_scales, sorted descending
    long long T = 0;
    std::vector<double> stderrs;  // batch-means standard errors, same order
};

// Batch-means error bars use contiguous blocks of ceil(sqrt(T)) steps; with
// fewer than two complete blocks the standard error is reported as 0.
// Throws std::domain_error when no factor has been absorbed.
LyapunovEstimate lyapunov_estimate(const ChainState& state);

// log y_i of the product factors.back() * ... * factors.front(), sorted
// descending.  Requires 1 <= T <= 200 and square factors of equal size;
// agrees with a direct dense-product SVD to 1e-8 whenever the latter does
// not overflow.
std::vector<double> exact_log_squared_singular_values(const std::vector<ComplexMatrix>& factors);

}  // namespace picketlab
