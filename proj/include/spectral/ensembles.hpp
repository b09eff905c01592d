#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral/complex_matrix.hpp"
#include "spectral/rng.hpp"
#include "spectral/stats.hpp"

namespace spectral {

// Entries have independent N(0, 1/(2n)) real and imaginary parts, so
// E|g_ij|^2 = 1/n.
CMatrix sample_complex_ginibre(int n, Rng& rng);
// Real entries N(0, 1/n), imaginary parts exactly zero.
CMatrix sample_real_ginibre(int n, Rng& rng);
// Real entries N(0, 1), imaginary parts exactly zero (unnormalized).
CMatrix sample_real_gaussian_std(int n, Rng& rng);

// P[smallest singular value of an n x n complex Ginibre < eps]
// = 1 - exp(-eps^2 n^2), exact at every n.
double smin_cdf_exact(int n, double eps);

struct TailPoint {
  double param = 0.0;      // grid value (eps or t)
  double reference = 0.0;  // exact probability or upper bound at this point
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  WilsonInterval ci;
  bool pass = false;
};

struct TailReport {
  std::string law;       // smin-exact | s1-tail | small-ball | sst-real
  bool exact_law = false;  // switches the per-point pass rule
  int n = 0;
  double delta = 0.0;  // only meaningful for small-ball
  std::int64_t trials = 0;
  std::vector<TailPoint> points;
  double pass_fraction = 0.0;
  bool pass = false;
};

nlohmann::json tail_report_to_json(const TailReport& r);

// Empirical CDF of the smallest singular value against the exact law.
// Passes when the exact value lies inside the 99% Wilson interval at >= 90%
// of grid points.
TailReport verify_smin_law(int n, const std::vector<double>& eps_grid,
                           std::int64_t trials, const RngSpec& spec,
                           int workers);

// P[s_1 > 2*sqrt(2) + t] <= 2 exp(-n t^2) for the complex Ginibre ensemble.
TailReport verify_s1_tail(int n, const std::vector<double>& t_grid,
                          std::int64_t trials, const RngSpec& spec,
                          int workers);

// P[smallest singular value of M + delta*G < eps] <= n^2 eps^2 / delta^2.
TailReport verify_small_ball(const CMatrix& m, double delta,
                             const std::vector<double>& eps_grid,
                             std::int64_t trials, const RngSpec& spec,
                             int workers);

// P[smallest singular value of A + G < eps] <= eps * sqrt(n) for real A and
// G with standard real Gaussian entries.
TailReport verify_sst_real(const CMatrix& a,
                           const std::vector<double>& eps_grid,
                           std::int64_t trials, const RngSpec& spec,
                           int workers);

}  // namespace spectral
