#include "picketlab/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace picketlab {

namespace {

void fill_gaussian(ComplexMatrix& A, Xoshiro256pp& rng) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            A(i, j) = standard_complex_gaussian(rng);
}

}  // namespace

ComplexMatrix sample_ginibre(int n, Xoshiro256pp& rng) {
    if (n < 1)
        throw std::domain_error("sample_ginibre: n must be >= 1");
    ComplexMatrix X(n, n);
    fill_gaussian(X, rng);
    return X;
}

ComplexMatrix sample_haar_corner(int n, long long L, Xoshiro256pp& rng) {
    if (n < 1)
        throw std::domain_error("sample_haar_corner: n must be >= 1");
    if (L <= n)
        throw std::domain_error("sample_haar_corner: L must exceed n");
    ComplexMatrix A(L, n);
    fill_gaussian(A, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(A);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(L, n);
    // A = QR with R-diagonal made real positive fixes the frame uniquely, so
    // Q is exactly Haar-distributed on the Stiefel manifold.
    for (int j = 0; j < n; ++j) {
        const std::complex<double> r = qr.matrixQR()(j, j);
        const double mag = std::abs(r);
        if (mag == 0.0)
            throw std::runtime_error("sample_haar_corner: rank-deficient Gaussian block");
        Q.col(j) *= r / mag;
    }
    return std::sqrt(static_cast<double>(L)) * Q.topRows(n);
}

ComplexMatrix sample_factor(Entry entry, int n, Xoshiro256pp& rng) {
    if (entry.infinite)
        return sample_ginibre(n, rng);
    return sample_haar_corner(n, entry.value, rng);
}

}  // namespace picketlab
