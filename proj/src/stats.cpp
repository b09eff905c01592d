#include "spectral/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral {

WilsonInterval wilson99(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("wilson99: trials must be positive");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson99: successes out of range");
  const double z = kZ99;
  const double nd = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nd;
  const double z2n = z * z / nd;
  const double denom = 1.0 + z2n;
  const double center = (p + 0.5 * z2n) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nd + 0.25 * z2n / nd) / denom;
  WilsonInterval w;
  w.p_hat = p;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  return w;
}

double kolmogorov_q(double x) {
  if (!(x > 0.0)) return 1.0;
  const double a2 = -2.0 * x * x;
  double fac = 2.0;
  double sum = 0.0;
  double prev_term = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double term = fac * std::exp(a2 * j * j);
    sum += term;
    if (std::abs(term) <= 0.001 * prev_term || std::abs(term) <= 1e-12 * std::abs(sum))
      return std::clamp(sum, 0.0, 1.0);
    fac = -fac;
    prev_term = std::abs(term);
  }
  return 1.0;  // series failed to move: x so small the statistic is vacuous
}

namespace {

// Finite-sample correction from the classical KS asymptotics.
double ks_p_from(double d, double n_eff) {
  double sq = std::sqrt(n_eff);
  return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(hi - f, f - lo));
  }
  return {d, ks_p_from(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double fa = 0.0, fb = 0.0, d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double va = a[ia];
    double vb = b[ib];
    if (va <= vb) fa = static_cast<double>(++ia) / na;
    if (vb <= va) fb = static_cast<double>(++ib) / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  double n_eff = na * nb / (na + nb);
  return {d, ks_p_from(d, n_eff)};
}

bool bound_pass(double bound, const WilsonInterval& ci) {
  return bound >= ci.lo;
}

bool exact_pass(double exact, const WilsonInterval& ci) {
  return exact >= ci.lo && exact <= ci.hi;
}

}  // namespace spectral
