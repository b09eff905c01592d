#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "spectral/conditioning.hpp"
#include "spectral/ensembles.hpp"

namespace spectral {

// Minimizer of t*sqrt(s) subject to 2 exp(-4 (t - 2 sqrt(2))^2) + 1/s < 1,
// t > 2 sqrt(2), s > 1. objective = t * sqrt(s).
struct StOptimum {
  double t = 0.0;
  double s = 0.0;
  double objective = 0.0;
};

StOptimum optimize_st();

// Certified Ginibre regularization: E = (delta/t) G_n in the frame where A
// is scaled to unit operator norm. The certificate holds when both sampled
// events hold:
//   (a) ||E|| <= delta * ||A||  (absolute floor ||E|| <= delta when A = 0),
//   (b) the squared-condition-number mass of A + E over the disk
//       D(0, ||A|| + delta) is at most s * n^2 * vol/(pi (delta/t)^2),
// and it implies kappa_V(A + E) <= 4 n^{3/2} (1 + 1/delta).
struct RegularizationResult {
  CMatrix E;
  double kappa_V_after = 0.0;
  double overlap_sum = 0.0;  // over D(0, ||A|| + delta), scaled frame
  double norm_E = 0.0;
  int attempts_used = 0;
  bool cert_norm_event = false;
  bool cert_overlap_event = false;
  bool certificate = false;
  // Diagnostics, all in the unit-norm frame.
  double overlap_threshold = 0.0;
  double bound_kappa_V = 0.0;
  double scale = 1.0;  // max(||A||, floor); E is scaled back by this
  double delta = 0.0;
  int n = 0;
};

// Tries up to max_attempts independent draws and returns the first certified
// one; if none certifies, returns the attempt with the smallest
// kappa_V_after, certificate = false. Never throws on exhaustion.
RegularizationResult regularize(const CMatrix& a, double delta,
                                int max_attempts, const RngSpec& spec);

// delta = min(2 n^{3/4} sqrt(eps), 1 - 1e-9): the choice balancing
// kappa_V * eps against ||E||; certified results satisfy
// kappa_V * eps + ||E|| <= 8 n^{3/2} sqrt(eps) for ||A|| <= 1.
struct DaviesResult {
  RegularizationResult reg;
  double epsilon = 0.0;
  double delta_used = 0.0;
  double objective = 0.0;  // kappa_V_after * eps + norm_E
  double bound = 0.0;      // 8 n^{3/2} sqrt(eps)
  bool pass = false;       // certified and objective <= bound
};

DaviesResult davies_tradeoff(const CMatrix& a, double eps, int max_attempts,
                             const RngSpec& spec);

// Monte Carlo check that E[sum of squared eigenvalue condition numbers of
// A + delta*G over region] stays below n^2 vol(region)/(pi delta^2).
// Requires ||A|| <= 1, delta in (0, 1). Near-defective draws are resampled
// and counted.
struct TheoremBReport {
  double mean = 0.0;
  double ci_lo = 0.0;  // 99% normal interval on the mean
  double ci_hi = 0.0;
  double bound = 0.0;
  std::int64_t trials = 0;
  std::int64_t resampled = 0;
  double delta = 0.0;
  bool pass = false;
};

TheoremBReport verify_theorem_b(const CMatrix& a, double delta,
                                const RegionSpec& region, std::int64_t trials,
                                const RngSpec& spec, int workers);

// Smallest kappa_V reachable from the n x n Jordan block by unit-norm
// perturbations delta*E across trials, per delta. slope is the least-squares
// slope of log(min kappa_V) against log(1/delta); davies_upper[k] =
// 2/delta^{1 - 1/n} bounds each minimum from above (up to trial noise).
struct JordanScanReport {
  int n = 0;
  std::int64_t trials = 0;
  std::vector<double> deltas;
  std::vector<double> min_kappa;
  std::vector<double> davies_upper;
  double slope = 0.0;
};

JordanScanReport jordan_scan(int n, const std::vector<double>& delta_list,
                             std::int64_t trials, const RngSpec& spec,
                             int workers);

// Radial profile of squared eigenvalue condition numbers for the complex
// Ginibre ensemble. Bin k is centered at k/r_bins with width 1/r_bins;
// mean_overlap_over_n[k] is the per-eigenvalue average of kappa^2/n in the
// bin, which approaches 1 - |z|^2 in the bulk. total_over_n2 is the
// per-trial average of (sum of kappa^2)/n^2.
struct BulkProfileReport {
  int n = 0;
  std::int64_t trials = 0;
  int r_bins = 0;
  std::vector<double> centers;
  std::vector<double> mean_overlap_over_n;
  std::vector<std::int64_t> counts;
  double total_over_n2 = 0.0;
};

BulkProfileReport bulk_overlap_profile(int n, std::int64_t trials, int r_bins,
                                       const RngSpec& spec, int workers);

nlohmann::json regularization_to_json(const RegularizationResult& r);
nlohmann::json theorem_b_to_json(const TheoremBReport& r);
nlohmann::json jordan_scan_to_json(const JordanScanReport& r);
nlohmann::json bulk_profile_to_json(const BulkProfileReport& r);

}  // namespace spectral
