#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spectral/complex_matrix.hpp"

namespace spectral {

// M = U diag(s) V^*, singular values nonincreasing and nonnegative, U and V
// unitary to ~1e-10 * n.
struct SvdResult {
  std::vector<double> singular_values;
  CMatrix U;
  CMatrix V;
};

// Eigendecomposition of a matrix with numerically distinct eigenvalues.
// Eigenvalues sorted lexicographically by (real, imag). Column i of
// right_vectors is the unit right eigenvector v_i, phase-fixed so its
// largest-modulus entry is real positive. Row i of left_vectors is w_i^*
// scaled so w_i^* v_i = 1. overlaps[i] = ||v_i|| ||w_i|| = ||w_i|| >= 1 is
// the eigenvalue condition number.
struct SpectralData {
  std::vector<cdouble> eigenvalues;
  CMatrix right_vectors;
  CMatrix left_vectors;
  std::vector<double> overlaps;
};

// Raised when an eigenvalue pair is closer than gap_tol and the
// eigenvector-dependent quantities stop being trustworthy.
struct NearDefectiveError : std::runtime_error {
  NearDefectiveError(int i_, int j_, cdouble li, cdouble lj, double gap_,
                     double tol_);
  int i;
  int j;
  cdouble lambda_i;
  cdouble lambda_j;
  double gap;
  double tol;
};

// Minimum pairwise eigenvalue separation treated as resolvable:
// 1e-10 * max(1, ||M||).
double gap_tol(const CMatrix& m);

SvdResult svd(const CMatrix& m);
// Throws NearDefectiveError when some eigenvalue pair is within gap_tol(m).
SpectralData eig(const CMatrix& m);
// Largest singular value.
double operator_norm(const CMatrix& m);
// Smallest singular value of zI - M; 1-Lipschitz in z.
double resolvent_smin(const CMatrix& m, cdouble z);

}  // namespace spectral
