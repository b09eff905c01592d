#include "spectral/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spectral {

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
  Eigen::MatrixXcd e(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) e(i, j) = m(i, j);
  return e;
}

CMatrix from_eigen(const Eigen::MatrixXcd& e) {
  CMatrix m(static_cast<int>(e.rows()));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m(i, j) = e(i, j);
  return m;
}

void require_finite(const CMatrix& m, const char* op) {
  if (m.n < 1) throw std::invalid_argument(std::string(op) + ": empty matrix");
  if (!m.finite())
    throw std::invalid_argument(std::string(op) + ": non-finite entry");
}

}  // namespace

NearDefectiveError::NearDefectiveError(int i_, int j_, cdouble li, cdouble lj,
                                       double gap_, double tol_)
    : std::runtime_error(
          "near-defective eigenvalue pair (" + std::to_string(i_) + ", " +
          std::to_string(j_) + "): gap " + std::to_string(gap_) +
          " below tolerance " + std::to_string(tol_)),
      i(i_),
      j(j_),
      lambda_i(li),
      lambda_j(lj),
      gap(gap_),
      tol(tol_) {}

double gap_tol(const CMatrix& m) {
  return 1e-10 * std::max(1.0, operator_norm(m));
}

SvdResult svd(const CMatrix& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(
      to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.singular_values.assign(solver.singularValues().data(),
                           solver.singularValues().data() + m.n);
  r.U = from_eigen(solver.matrixU());
  r.V = from_eigen(solver.matrixV());
  return r;
}

double operator_norm(const CMatrix& m) {
  require_finite(m, "operator_norm");
  if (m.n == 1) return std::abs(m.a[0]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(to_eigen(m));
  return solver.singularValues()(0);
}

double resolvent_smin(const CMatrix& m, cdouble z) {
  require_finite(m, "resolvent_smin");
  Eigen::MatrixXcd shifted = -to_eigen(m);
  for (int i = 0; i < m.n; ++i) shifted(i, i) += z;
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(shifted);
  return solver.singularValues()(m.n - 1);
}

SpectralData eig(const CMatrix& m) {
  require_finite(m, "eig");
  const int n = m.n;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig: eigensolver failed to converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (ev(x).real() != ev(y).real()) return ev(x).real() < ev(y).real();
    return ev(x).imag() < ev(y).imag();
  });

  SpectralData sd;
  sd.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) sd.eigenvalues[i] = ev(order[i]);

  const double tol = gap_tol(m);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double gap = std::abs(sd.eigenvalues[i] - sd.eigenvalues[j]);
      if (gap <= tol)
        throw NearDefectiveError(i, j, sd.eigenvalues[i], sd.eigenvalues[j],
                                 gap, tol);
    }

  // Unit right eigenvectors, phase-fixed: the largest-modulus entry is made
  // real positive (ties broken by the lowest index) so the decomposition is
  // a deterministic function of the matrix.
  Eigen::MatrixXcd V(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd v = solver.eigenvectors().col(order[i]);
    v.normalize();
    int pivot = 0;
    double best = -1.0;
    for (int k = 0; k < n; ++k) {
      double mag = std::abs(v(k));
      if (mag > best) {
        best = mag;
        pivot = k;
      }
    }
    cdouble phase = v(pivot) / std::abs(v(pivot));
    V.col(i) = v / phase;
  }

  // Rows of V^{-1} are left eigenvectors with w_i^* v_i = 1 already; rescale
  // anyway to pin the normalization against inversion roundoff.
  Eigen::MatrixXcd W = Eigen::PartialPivLU<Eigen::MatrixXcd>(V).inverse();
  sd.overlaps.resize(n);
  for (int i = 0; i < n; ++i) {
    cdouble align = W.row(i) * V.col(i);
    if (align == cdouble{})
      throw std::runtime_error("eig: left/right eigenvector alignment vanished");
    W.row(i) /= align;
    sd.overlaps[i] = W.row(i).norm();
  }

  sd.right_vectors = from_eigen(V);
  sd.left_vectors = from_eigen(W);
  return sd;
}

}  // namespace spectral
