#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral/complex_matrix.hpp"
#include "spectral/rng.hpp"
#include "spectral/stats.hpp"

namespace spectral {

enum class SdeVariant { complex_singular, real_wishart };

// Drift of the singular-value process of A + sqrt(t) G with G complex
// Ginibre (entry variance 1/n): coordinate i gets
//   (1/(2 s_i)) (1 - 1/(2n) + sum_{j != i} (s_i^2 + s_j^2)/(n (s_i^2 - s_j^2)))
// and every coordinate diffuses with constant 1/sqrt(2n).
std::vector<double> drift_complex(const std::vector<double>& s, int n);

// Eigenvalue process of the real Wishart flow in its conventional
// presentation: drift_i = 1 + sum_{j != i} (l_i + l_j)/(l_i - l_j),
// diffusion_i = 2 sqrt(l_i)/n.
struct RealWishartCoeffs {
  std::vector<double> drift;
  std::vector<double> diffusion;
};

RealWishartCoeffs drift_real_wishart(const std::vector<double>& lambda, int n);

// The interaction drift a_i(l) = 1 + sum_{j != i} (l_i + l_j)/(l_i - l_j) is
// quasi-monotone on ordered configurations: freezing coordinate i and
// raising the others never decreases a_i. Checks a_i(l1) <= a_i(l2) + 1e-12
// for configurations with l1 <= l2 componentwise and l1[i] == l2[i].
bool quasi_monotone_check(const std::vector<double>& l1,
                          const std::vector<double>& l2, int i);

// Two singular-value paths driven by the same per-coordinate Brownian
// increments. path1/path2[k] is the full coordinate vector at times[k]
// (sigma coordinates; the real variant integrates lambda = sigma^2 and
// reports sqrt). ordering_violation_count counts coordinates where path1
// exceeds path2 by more than tol_ord = 10 sqrt(max accepted step)/n,
// given componentwise-ordered initial data.
struct CoupledPaths {
  std::vector<double> times;
  std::vector<std::vector<double>> path1;
  std::vector<std::vector<double>> path2;
  std::int64_t ordering_violation_count = 0;
  double max_violation = 0.0;
  double tol_ord = 0.0;
  bool completed = false;
  double t_reached = 0.0;
  double max_step_used = 0.0;
};

// Step-doubling/halving Euler scheme: a proposed step (shared Gaussian
// increment vector across both processes) is accepted only when both
// proposals stay strictly ordered with gaps >= 1e-6 (in the integrated
// coordinates) and, for the real variant, values >= 1e-8; otherwise the step
// halves and fresh shared noise is drawn. Steps below 1e-12 * t_final abort
// the run with the partial path (completed = false). init vectors are sigma
// coordinates, strictly decreasing, with init1 <= init2 componentwise.
CoupledPaths couple_evolve(const std::vector<double>& init1,
                           const std::vector<double>& init2, double t_final,
                           std::int64_t steps, SdeVariant variant, Rng rng);

// Endpoint-law test: integrates `trials` independent paths started at the
// singular values of A and compares each coordinate's endpoint sample with
// direct draws of the singular values of A + sqrt(t) G by a two-sample KS
// test, Bonferroni-corrected across coordinates. A zero matrix A with the
// complex variant additionally gets a one-sample KS test of the smallest
// coordinate against the exact law 1 - exp(-eps^2 n^2).
struct MarginalReport {
  SdeVariant variant = SdeVariant::complex_singular;
  int n = 0;
  double t = 0.0;
  std::int64_t trials = 0;
  std::int64_t steps = 0;
  std::vector<double> ks_d;      // per coordinate
  std::vector<double> ks_p;      // raw p-values
  std::vector<double> ks_p_adj;  // Bonferroni-adjusted
  std::optional<KsResult> smallest_vs_exact;
  std::int64_t incomplete_paths = 0;
  bool pass = false;
};

MarginalReport marginal_law_check(const CMatrix& a, double t,
                                  std::int64_t trials, std::int64_t steps,
                                  SdeVariant variant, const RngSpec& spec,
                                  int workers);

nlohmann::json marginal_report_to_json(const MarginalReport& r);

}  // namespace spectral
