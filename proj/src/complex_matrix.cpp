#include "spectral/complex_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spectral/rng.hpp"

namespace spectral {

bool CMatrix::finite() const {
  for (const cdouble& v : a)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

bool operator==(const CMatrix& x, const CMatrix& y) {
  return x.n == y.n && x.a == y.a;
}

CMatrix identity(int n) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix zero_matrix(int n) { return CMatrix(n); }

CMatrix jordan_block(int n) {
  CMatrix m(n);
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
  return m;
}

CMatrix diag_matrix(const std::vector<cdouble>& d) {
  CMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n; ++i) m(i, i) = d[i];
  return m;
}

CMatrix toeplitz_sample(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("toeplitz_sample: n must be >= 1");
  CMatrix m(n);
  Rng rng(seed, 0);
  for (int d = 1; d < n; ++d) {
    double g = rng.next_gaussian();
    for (int i = 0; i + d < n; ++i) m(i, i + d) = g;
  }
  return m;
}

CMatrix conj_transpose(const CMatrix& m) {
  CMatrix r(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

CMatrix matmul(const CMatrix& x, const CMatrix& y) {
  if (x.n != y.n) throw std::invalid_argument("matmul: size mismatch");
  CMatrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      cdouble v = x(i, k);
      if (v == cdouble{}) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
  if (x.n != y.n) throw std::invalid_argument("matrix add: size mismatch");
  CMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
  if (x.n != y.n) throw std::invalid_argument("matrix sub: size mismatch");
  CMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

CMatrix operator*(cdouble s, const CMatrix& x) {
  CMatrix r = x;
  for (cdouble& v : r.a) v *= s;
  return r;
}

double frobenius_norm(const CMatrix& m) {
  double sum = 0.0;
  for (const cdouble& v : m.a) sum += std::norm(v);
  return std::sqrt(sum);
}

cdouble trace(const CMatrix& m) {
  cdouble t = 0.0;
  for (int i = 0; i < m.n; ++i) t += m(i, i);
  return t;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void validate_loaded(const CMatrix& m, const std::string& path) {
  if (m.n < 1) throw std::runtime_error("matrix file " + path + ": n must be >= 1");
  if (!m.finite())
    throw std::runtime_error("matrix file " + path + ": non-finite entry");
}

CMatrix read_matrix_json(const std::string& text, const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("n") || !j.contains("entries") || j.size() != 2)
    throw std::runtime_error("matrix file " + path +
                             ": expected exactly {\"n\", \"entries\"}");
  if (!j["n"].is_number_integer())
    throw std::runtime_error("matrix file " + path + ": n must be an integer");
  int n = j["n"].get<int>();
  const auto& entries = j["entries"];
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw std::runtime_error("matrix file " + path + ": entries must be an array of n*n pairs");
  CMatrix m(n);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::runtime_error("matrix file " + path + ": entry " +
                               std::to_string(k) + " must be [re, im]");
    m.a[k] = cdouble(e[0].get<double>(), e[1].get<double>());
  }
  validate_loaded(m, path);
  return m;
}

CMatrix read_matrix_text(const std::string& text, const std::string& path) {
  std::istringstream in(text);
  long long n = 0;
  if (!(in >> n) || n < 1)
    throw std::runtime_error("matrix file " + path + ": bad size header");
  CMatrix m(static_cast<int>(n));
  for (std::size_t k = 0; k < m.a.size(); ++k) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im))
      throw std::runtime_error("matrix file " + path + ": truncated at entry " +
                               std::to_string(k));
    m.a[k] = cdouble(re, im);
  }
  std::string extra;
  if (in >> extra)
    throw std::runtime_error("matrix file " + path + ": trailing data");
  validate_loaded(m, path);
  return m;
}

}  // namespace

void write_matrix_json(const CMatrix& m, const std::string& path) {
  if (!m.finite())
    throw std::runtime_error("refusing to write non-finite matrix to " + path);
  nlohmann::json entries = nlohmann::json::array();
  for (const cdouble& v : m.a)
    entries.push_back(nlohmann::json::array({v.real(), v.imag()}));
  nlohmann::json j{{"n", m.n}, {"entries", std::move(entries)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_matrix_text(const CMatrix& m, const std::string& path) {
  if (!m.finite())
    throw std::runtime_error("refusing to write non-finite matrix to " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << m.n << '\n';
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      const cdouble& v = m(i, j);
      out << format_double(v.real()) << ' ' << format_double(v.imag());
      out << (j + 1 == m.n ? '\n' : ' ');
    }
  }
}

CMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read matrix file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    throw std::runtime_error("matrix file " + path + ": empty");
  if (text[first] == '{') return read_matrix_json(text, path);
  return read_matrix_text(text, path);
}

namespace {

// Complex literal: "1", "-2.5", "i", "-i", "2i", "1+2i", "1.5e-3-2i".
cdouble parse_complex_literal(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty complex literal");

  auto parse_real = [](const std::string& text) {
    if (text.empty() || text == "+" || text == "-")
      throw std::invalid_argument("bad number '" + text + "'");
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + text + "'");
    }
    if (used != text.size())
      throw std::invalid_argument("bad number '" + text + "'");
    return v;
  };
  auto parse_imag_coeff = [&](std::string text) {
    // text ends with 'i'
    text.pop_back();
    if (text.empty() || text == "+") return 1.0;
    if (text == "-") return -1.0;
    return parse_real(text);
  };

  if (s.back() != 'i') return cdouble(parse_real(s), 0.0);

  // Split at the last +/- that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size() - 1; k > 0; --k) {
    char c = s[k];
    if (c != '+' && c != '-') continue;
    char prev = s[k - 1];
    if (prev == 'e' || prev == 'E') continue;
    split = k;
    break;
  }
  if (split == std::string::npos)
    return cdouble(0.0, parse_imag_coeff(s));
  return cdouble(parse_real(s.substr(0, split)),
                 parse_imag_coeff(s.substr(split)));
}

std::vector<std::string> split_args(const std::string& inner) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

long long parse_int_arg(const std::string& raw, const std::string& what) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument(what + ": missing integer");
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": bad integer '" + raw + "'");
  }
  if (used != s.size())
    throw std::invalid_argument(what + ": bad integer '" + raw + "'");
  return v;
}

}  // namespace

bool looks_like_generator(const std::string& source) {
  // Anything shaped like `name(...)` is treated as a generator attempt, so a
  // misspelled generator reports "unknown matrix generator" instead of being
  // probed as a file path.  Strings containing a path separator are always
  // file paths.
  if (source.empty() || source.back() != ')') return false;
  std::size_t open = source.find('(');
  if (open == 0 || open == std::string::npos) return false;
  for (std::size_t i = 0; i < open; ++i) {
    char c = source[i];
    bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!word) return false;
  }
  return true;
}

CMatrix matrix_from_source(const std::string& source) {
  if (!looks_like_generator(source)) return read_matrix(source);
  if (source.back() != ')')
    throw std::invalid_argument("matrix generator '" + source +
                                "': missing closing parenthesis");
  std::size_t open = source.find('(');
  std::string name = source.substr(0, open);
  std::string inner = source.substr(open + 1, source.size() - open - 2);
  std::vector<std::string> args = split_args(inner);

  auto expect_argc = [&](std::size_t c) {
    if (args.size() != c)
      throw std::invalid_argument("matrix generator '" + name + "': expected " +
                                  std::to_string(c) + " argument(s)");
  };

  if (name == "jordan" || name == "zero") {
    expect_argc(1);
    long long n = parse_int_arg(args[0], name);
    if (n < 1 || n > 100000)
      throw std::invalid_argument(name + ": size out of range");
    return name == "jordan" ? jordan_block(static_cast<int>(n))
                            : zero_matrix(static_cast<int>(n));
  }
  if (name == "diag") {
    if (inner.find_first_not_of(" \t") == std::string::npos)
      throw std::invalid_argument("diag: needs at least one entry");
    std::vector<cdouble> d;
    d.reserve(args.size());
    for (const std::string& arg : args) d.push_back(parse_complex_literal(arg));
    return diag_matrix(d);
  }
  if (name == "toeplitz-sample") {
    expect_argc(2);
    long long n = parse_int_arg(args[0], name);
    long long seed = parse_int_arg(args[1], name);
    if (n < 1 || n > 100000)
      throw std::invalid_argument("toeplitz-sample: size out of range");
    if (seed < 0) throw std::invalid_argument("toeplitz-sample: seed must be >= 0");
    return toeplitz_sample(static_cast<int>(n), static_cast<std::uint64_t>(seed));
  }
  throw std::invalid_argument("unknown matrix generator '" + name + "'");
}

}  // namespace spectral
