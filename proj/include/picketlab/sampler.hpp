// sampler.hpp - random factor draws.
//
// Two ensembles:
//
//   P_{n,inf} : n x n complex Ginibre, iid standard complex Gaussian entries
//               (E|g|^2 = 1; that convention is what makes E[y] = 1 for a
//               single n = 1 factor).
//   P_{n,L}   : sqrt(L) times the top-left n x n corner of an L x L Haar
//               unitary.  Only n columns of the Haar matrix are ever needed,
//               so the draw is the thin QR of an L x n Gaussian block with
//               each Q-column phase-fixed to make the matching R-diagonal
//               entry real positive; the first n rows of that frame are the
//               corner.  Cost O(L n^2).
//
// Every singular value of a P_{n,L} draw lies in [0, sqrt(L)].
// Entries are always drawn in row-major order, so a draw is a pure function
// of (parameters, stream).

#pragma once

#include <Eigen/Dense>

#include "picketlab/ensemble.hpp"
#include "picketlab/rng.hpp"

namespace picketlab {

using ComplexMatrix = Eigen::MatrixXcd;

// n x n Ginibre draw; n >= 1, else std::domain_error.
ComplexMatrix sample_ginibre(int n, Xoshiro256pp& rng);

// sqrt(L) times an n x n Haar-unitary corner; L > n >= 1, else std::domain_error.
ComplexMatrix sample_haar_corner(int n, long long L, Xoshiro256pp& rng);

// Dispatch on the entry: infinity -> Ginibre, finite L -> Haar corner.
ComplexMatrix sample_factor(Entry entry, int n, Xoshiro256pp& rng);

}  // namespace picketlab
