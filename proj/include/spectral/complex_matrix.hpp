#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace spectral {

using cdouble = std::complex<double>;

// Dense square complex matrix, row-major.
struct CMatrix {
  int n = 0;
  std::vector<cdouble> a;

  CMatrix() = default;
  explicit CMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size) {}

  cdouble& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const cdouble& operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
  bool finite() const;
};

bool operator==(const CMatrix& x, const CMatrix& y);

CMatrix identity(int n);
CMatrix zero_matrix(int n);
// Single Jordan block with eigenvalue 0: ones on the superdiagonal.
CMatrix jordan_block(int n);
CMatrix diag_matrix(const std::vector<cdouble>& d);
// Upper-triangular Toeplitz with zero diagonal: each superdiagonal carries
// one standard real Gaussian draw, sampled by diagonal offset.
CMatrix toeplitz_sample(int n, std::uint64_t seed);

CMatrix conj_transpose(const CMatrix& m);
CMatrix matmul(const CMatrix& x, const CMatrix& y);
CMatrix operator+(const CMatrix& x, const CMatrix& y);
CMatrix operator-(const CMatrix& x, const CMatrix& y);
CMatrix operator*(cdouble s, const CMatrix& x);
double frobenius_norm(const CMatrix& m);
cdouble trace(const CMatrix& m);

// Text for a double that parses back to the same bits ("%.17g").
std::string format_double(double v);

// JSON form: {"n": 3, "entries": [[re, im], ...]} row-major.
// Text form: n on the first line, then n*n whitespace-separated "re im" pairs.
// Both round-trip bit-exactly.
void write_matrix_json(const CMatrix& m, const std::string& path);
void write_matrix_text(const CMatrix& m, const std::string& path);
// Sniffs the format (JSON when the first non-space byte is '{').
CMatrix read_matrix(const std::string& path);

// Resolves a matrix source string: either a path to a matrix file or a
// generator expression "jordan(n)", "zero(n)", "diag(z1,...,zn)" with complex
// literals like "1", "-2.5i", "1+2i", or "toeplitz-sample(n, seed)".
CMatrix matrix_from_source(const std::string& source);
bool looks_like_generator(const std::string& source);

}  // namespace spectral
