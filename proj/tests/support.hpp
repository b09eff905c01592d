#pragma once

// Shared helpers for the test binaries: seeded random matrices with
// structure (Haar-like unitaries via QR), scratch directories, and byte
// comparison of files.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "spectral/complex_matrix.hpp"

namespace testsupport {

using spectral::cdouble;
using spectral::CMatrix;

// Unitary matrix from the QR factorization of a seeded std::mt19937 Gaussian
// matrix, with the R diagonal's phases folded in so the distribution does not
// depend on the QR convention. Independent of the library's own RNG.
inline CMatrix random_unitary(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = cdouble(normal(gen), normal(gen));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cdouble d = r(j, j);
    cdouble phase = d == cdouble(0.0, 0.0) ? cdouble(1.0, 0.0) : d / std::abs(d);
    q.col(j) *= phase;
  }
  CMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = q(i, j);
  return out;
}

// Dense matrix with seeded standard-complex-Gaussian entries, independent of
// the library's RNG.
inline CMatrix random_dense(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(n);
  for (cdouble& v : m.a) v = cdouble(normal(gen), normal(gen));
  return m;
}

// Fresh scratch directory under the system temp dir; unique per call.
inline std::string scratch_dir(const std::string& tag) {
  static int counter = 0;
  std::filesystem::path p = std::filesystem::temp_directory_path() /
                            ("spectral-test-" + tag + "-" +
                             std::to_string(counter++) + "-" +
                             std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p.string();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool same_bytes(const std::string& a, const std::string& b) {
  return slurp(a) == slurp(b);
}

}  // namespace testsupport
