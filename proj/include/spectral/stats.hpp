#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace spectral {

// z quantile for two-sided 99% coverage.
inline constexpr double kZ99 = 2.5758293035489004;

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
  double p_hat = 0.0;
};

// Wilson score interval at 99% confidence for a binomial proportion.
WilsonInterval wilson99(std::int64_t successes, std::int64_t trials);

// Kolmogorov distribution survival function
// Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_q(double x);

struct KsResult {
  double d = 0.0;  // sup-norm distance between the compared CDFs
  double p = 1.0;  // approximate p-value (finite-sample corrected)
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov test (tie-aware sup distance).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pass rules shared by the tail verifiers: an upper bound passes when it is
// not excluded from above (bound >= lower confidence edge); an exact value
// must fall inside the interval.
bool bound_pass(double bound, const WilsonInterval& ci);
bool exact_pass(double exact, const WilsonInterval& ci);

}  // namespace spectral
