#include "picketlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace picketlab {

namespace {

constexpr double kOrthoDriftTolerance = 1e-10;

// QR of M with the R-diagonal phase-fixed real positive.  Writes Q into
// `frame`, adds log R_ii to `log_scales`, and returns false iff some
// R-diagonal entry vanishes.
bool qr_absorb(const ComplexMatrix& M, ComplexMatrix& frame, Eigen::VectorXd& log_increment) {
    const Eigen::Index n = M.rows();
    Eigen::HouseholderQR<ComplexMatrix> qr(M);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> r = qr.matrixQR()(i, i);
        const double mag = std::abs(r);
        if (mag == 0.0)
            return false;
        Q.col(i) *= r / mag;
        log_increment(i) = std::log(mag);
    }
    frame = std::move(Q);
    return true;
}

// Orthogonalizes the columns of W * diag(exp(d)) with right-handed Jacobi
// rotations and folds the rotated column norms back into d.  Every rotation
// is evaluated in the scaled representation: the column with the smaller
// scale is only ever updated through coefficients of its own magnitude, so
// round-off from the larger scale cannot reach it and each log scale keeps
// full relative accuracy no matter how steep the grading becomes.  On return
// the columns of W are orthonormal.  Returns false iff a column collapses
// to zero.
bool orthogonalize_graded(ComplexMatrix& W, Eigen::VectorXd& d) {
    const Eigen::Index n = W.cols();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double norm = W.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            return false;
        W.col(j) /= norm;
        d(j) += std::log(norm);
    }
    if (n < 2)
        return true;

    constexpr double kCosTolerance = 1e-14;
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double worst = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                Eigen::Index i = p, j = q;
                if (d(j) > d(i))
                    std::swap(i, j);
                const std::complex<double> xi = W.col(i).dot(W.col(j));
                const double cosine = std::abs(xi);
                worst = std::max(worst, cosine);
                if (cosine <= kCosTolerance)
                    continue;

                // With unit columns the scaled 2x2 Gram is
                // [[1, xi r], [conj(xi) r, r^2]] at r = exp(d_j - d_i) <= 1.
                // The classic tangent satisfies t^2 + 2 tau t - 1 = 0 with
                // tau = (r^2 - 1) / (2 |xi| r); t / r stays O(1) as r -> 0,
                // so it is computed directly from r tau = (r^2 - 1) / (2 |xi|).
                const double r = std::exp(d(j) - d(i));
                const double rtau = (r * r - 1.0) / (2.0 * cosine);
                const double t_over_r = -1.0 / (-rtau + std::sqrt(r * r + rtau * rtau));
                const double t = t_over_r * r;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const std::complex<double> phase_conj = std::conj(xi) / cosine;

                const Eigen::VectorXcd wi = W.col(i);
                const Eigen::VectorXcd wj = W.col(j);
                W.col(i) = c * wi - (c * t * r) * (phase_conj * wj);
                W.col(j) = (c * t_over_r) * wi + c * (phase_conj * wj);
                for (const Eigen::Index k : {i, j}) {
                    const double norm = W.col(k).norm();
                    if (!(norm > 0.0) || !std::isfinite(norm))
                        return false;
                    W.col(k) /= norm;
                    d(k) += std::log(norm);
                }
            }
        }
        if (worst <= kCosTolerance)
            return true;
    }
    throw std::runtime_error("orthogonalize_graded: Jacobi sweeps failed to converge");
}

}  // namespace

ChainState chain_init(int n) {
    if (n < 1)
        throw std::domain_error("chain_init: n must be >= 1");
    ChainState state;
    state.n = n;
    state.tau = 0;
    state.frame = ComplexMatrix::Identity(n, n);
    state.log_scales = Eigen::VectorXd::Zero(n);
    state.shift_sum = 0.0;
    return state;
}

void chain_step(ChainState& state, const ComplexMatrix& X, Entry L) {
    if (state.n < 1)
        throw std::invalid_argument("chain_step: uninitialized state");
    if (X.rows() != state.n || X.cols() != state.n)
        throw std::invalid_argument("chain_step: factor must be n x n");
    if (!X.allFinite())
        throw std::invalid_argument("chain_step: factor has non-finite entries");
    const double shift = shift_s(state.n, L);  // validates L against n up front

    Eigen::VectorXd increment(state.n);
    if (!qr_absorb(X * state.frame, state.frame, increment))
        throw std::runtime_error("chain_step: factor at tau = " +
                                 std::to_string(state.tau + 1) +
                                 " is singular to machine precision");
    state.log_scales += increment;
    state.step_log.insert(state.step_log.end(), increment.data(), increment.data() + state.n);
    state.shift_sum += shift;
    ++state.tau;

    // Householder Q is freshly orthonormal each step, so drift beyond the
    // tolerance is exceptional; the corrective QR keeps the determinant
    // identity intact by absorbing its own log R_ii.
    const double drift = (state.frame.adjoint() * state.frame -
                          ComplexMatrix::Identity(state.n, state.n))
                             .cwiseAbs()
                             .maxCoeff();
    if (drift > kOrthoDriftTolerance) {
        Eigen::VectorXd correction(state.n);
        if (!qr_absorb(ComplexMatrix(state.frame), state.frame, correction))
            throw std::runtime_error("chain_step: frame re-orthonormalization failed");
        state.log_scales += correction;
        for (int i = 0; i < state.n; ++i)
            state.step_log[state.step_log.size() - state.n + i] += correction(i);
    }
}

LyapunovEstimate lyapunov_estimate(const ChainState& state) {
    if (state.tau < 1)
        throw std::domain_error("lyapunov_estimate: no factors absorbed");
    const long long T = state.tau;
    const int n = state.n;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return state.log_scales(a) > state.log_scales(b); });

    LyapunovEstimate est;
    est.T = T;
    est.values.resize(n);
    est.stderrs.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        est.values[i] = 2.0 * state.log_scales(order[i]) / static_cast<double>(T);

    const long long block = static_cast<long long>(
        std::ceil(std::sqrt(static_cast<double>(T))));
    const long long nblocks = T / block;
    if (nblocks >= 2) {
        for (int i = 0; i < n; ++i) {
            const int dir = order[i];
            double mean = 0.0;
            std::vector<double> block_means(static_cast<std::size_t>(nblocks));
            for (long long b = 0; b < nblocks; ++b) {
                double sum = 0.0;
                for (long long t = b * block; t < (b + 1) * block; ++t)
                    sum += 2.0 * state.step_log[static_cast<std::size_t>(t) * n + dir];
                block_means[static_cast<std::size_t>(b)] = sum / static_cast<double>(block);
                mean += block_means[static_cast<std::size_t>(b)];
            }
            mean /= static_cast<double>(nblocks);
            double var = 0.0;
            for (double bm : block_means)
                var += (bm - mean) * (bm - mean);
            var /= static_cast<double>(nblocks - 1);
            est.stderrs[i] = std::sqrt(var / static_cast<double>(nblocks));
        }
    }
    return est;
}

std::vector<double> exact_log_squared_singular_values(const std::vector<ComplexMatrix>& factors) {
    if (factors.empty())
        throw std::invalid_argument("exact_log_squared_singular_values: empty factor list");
    if (factors.size() > 200)
        throw std::invalid_argument("exact_log_squared_singular_values: T must be <= 200");
    const Eigen::Index n = factors.front().rows();
    if (factors.front().cols() != n || n < 1)
        throw std::invalid_argument("exact_log_squared_singular_values: factors must be square");

    // Invariant after each absorption: the product so far equals
    // U * diag(exp(d)) * V* for some unitary V that is never materialized,
    // with U orthonormal.  Multiplying by X sends U to X U with the same
    // per-column scales, and the graded orthogonalization restores the
    // invariant without mixing scales across the grading.
    ComplexMatrix U = ComplexMatrix::Identity(n, n);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (const ComplexMatrix& X : factors) {
        if (X.rows() != n || X.cols() != n)
            throw std::invalid_argument(
                "exact_log_squared_singular_values: factor dimension mismatch");
        ComplexMatrix M = X * U;
        if (!orthogonalize_graded(M, d))
            throw std::runtime_error(
                "exact_log_squared_singular_values: product is singular to machine precision");
        U = std::move(M);
    }

    std::vector<double> log_y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        log_y[static_cast<std::size_t>(i)] = 2.0 * d(i);
    std::sort(log_y.begin(), log_y.end(), std::greater<>());
    return log_y;
}

}  // namespace picketlab
