#include "spectral/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectral/linalg.hpp"
#include "spectral/parallel.hpp"

namespace spectral {

CMatrix sample_complex_ginibre(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_complex_ginibre: n must be >= 1");
  CMatrix m(n);
  const double sd = 1.0 / std::sqrt(2.0 * n);
  for (cdouble& v : m.a)
    v = cdouble(sd * rng.next_gaussian(), sd * rng.next_gaussian());
  return m;
}

CMatrix sample_real_ginibre(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_real_ginibre: n must be >= 1");
  CMatrix m(n);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  for (cdouble& v : m.a) v = cdouble(sd * rng.next_gaussian(), 0.0);
  return m;
}

CMatrix sample_real_gaussian_std(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_real_gaussian_std: n must be >= 1");
  CMatrix m(n);
  for (cdouble& v : m.a) v = cdouble(rng.next_gaussian(), 0.0);
  return m;
}

double smin_cdf_exact(int n, double eps) {
  if (n < 1) throw std::invalid_argument("smin_cdf_exact: n must be >= 1");
  if (eps < 0.0) return 0.0;
  double x = eps * static_cast<double>(n);
  return -std::expm1(-x * x);
}

nlohmann::json tail_report_to_json(const TailReport& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const TailPoint& p : r.points) {
    points.push_back({{"param", p.param},
                      {"reference", p.reference},
                      {"hits", p.hits},
                      {"trials", p.trials},
                      {"p_hat", p.ci.p_hat},
                      {"ci_lo", p.ci.lo},
                      {"ci_hi", p.ci.hi},
                      {"pass", p.pass}});
  }
  return {{"law", r.law},          {"exact_law", r.exact_law},
          {"n", r.n},              {"delta", r.delta},
          {"trials", r.trials},    {"points", std::move(points)},
          {"pass_fraction", r.pass_fraction}, {"pass", r.pass}};
}

namespace {

void validate_grid(const std::vector<double>& grid, const char* name,
                   bool allow_zero) {
  if (grid.empty())
    throw std::invalid_argument(std::string(name) + ": empty grid");
  for (double v : grid) {
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0))
      throw std::invalid_argument(std::string(name) + ": bad grid value");
  }
}

// Runs `trials` independent draws of a scalar statistic (substream per
// trial) and counts, per grid point, how often pred(stat, grid[k]) holds.
// Slot-per-trial storage keeps the result independent of scheduling.
template <typename StatFn, typename Pred>
TailReport tail_scan(std::string law, bool exact_law, int n,
                     const std::vector<double>& grid, std::int64_t trials,
                     const RngSpec& spec, int workers, StatFn stat_fn,
                     Pred pred, const std::vector<double>& reference) {
  if (trials < 1) throw std::invalid_argument("tail verifier: trials must be >= 1");
  std::vector<double> stats(static_cast<std::size_t>(trials));
  Rng root(spec);
  parallel_for(trials, workers, [&](std::int64_t trial) {
    Rng r = root.substream(static_cast<std::uint64_t>(trial));
    stats[static_cast<std::size_t>(trial)] = stat_fn(r);
  });

  TailReport rep;
  rep.law = std::move(law);
  rep.exact_law = exact_law;
  rep.n = n;
  rep.trials = trials;
  int passed = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    TailPoint p;
    p.param = grid[k];
    p.reference = reference[k];
    p.trials = trials;
    for (double s : stats)
      if (pred(s, grid[k])) ++p.hits;
    p.ci = wilson99(p.hits, trials);
    p.pass = exact_law ? exact_pass(p.reference, p.ci) : bound_pass(p.reference, p.ci);
    passed += p.pass ? 1 : 0;
    rep.points.push_back(p);
  }
  rep.pass_fraction = static_cast<double>(passed) / static_cast<double>(grid.size());
  rep.pass = exact_law ? (rep.pass_fraction >= 0.9) : (passed == static_cast<int>(grid.size()));
  return rep;
}

double smallest_sv(const CMatrix& m) {
  SvdResult s = svd(m);
  return s.singular_values.back();
}

}  // namespace

TailReport verify_smin_law(int n, const std::vector<double>& eps_grid,
                           std::int64_t trials, const RngSpec& spec,
                           int workers) {
  validate_grid(eps_grid, "verify_smin_law", true);
  std::vector<double> reference;
  reference.reserve(eps_grid.size());
  for (double eps : eps_grid) reference.push_back(smin_cdf_exact(n, eps));
  return tail_scan(
      "smin-exact", true, n, eps_grid, trials, spec, workers,
      [n](Rng& r) { return smallest_sv(sample_complex_ginibre(n, r)); },
      [](double s, double eps) { return s < eps; }, reference);
}

TailReport verify_s1_tail(int n, const std::vector<double>& t_grid,
                          std::int64_t trials, const RngSpec& spec,
                          int workers) {
  validate_grid(t_grid, "verify_s1_tail", true);
  const double edge = 2.0 * std::sqrt(2.0);
  std::vector<double> reference;
  reference.reserve(t_grid.size());
  for (double t : t_grid)
    reference.push_back(std::min(1.0, 2.0 * std::exp(-n * t * t)));
  return tail_scan(
      "s1-tail", false, n, t_grid, trials, spec, workers,
      [n](Rng& r) { return operator_norm(sample_complex_ginibre(n, r)); },
      [edge](double s, double t) { return s > edge + t; }, reference);
}

TailReport verify_small_ball(const CMatrix& m, double delta,
                             const std::vector<double>& eps_grid,
                             std::int64_t trials, const RngSpec& spec,
                             int workers) {
  if (m.n < 1 || !m.finite())
    throw std::invalid_argument("verify_small_ball: bad matrix");
  if (!(delta > 0.0))
    throw std::invalid_argument("verify_small_ball: delta must be > 0");
  validate_grid(eps_grid, "verify_small_ball", true);
  const int n = m.n;
  std::vector<double> reference;
  reference.reserve(eps_grid.size());
  for (double eps : eps_grid)
    reference.push_back(
        std::min(1.0, static_cast<double>(n) * n * eps * eps / (delta * delta)));
  TailReport rep = tail_scan(
      "small-ball", false, n, eps_grid, trials, spec, workers,
      [&m, delta, n](Rng& r) {
        CMatrix g = sample_complex_ginibre(n, r);
        return smallest_sv(m + cdouble(delta, 0.0) * g);
      },
      [](double s, double eps) { return s < eps; }, reference);
  rep.delta = delta;
  return rep;
}

TailReport verify_sst_real(const CMatrix& a,
                           const std::vector<double>& eps_grid,
                           std::int64_t trials, const RngSpec& spec,
                           int workers) {
  if (a.n < 1 || !a.finite())
    throw std::invalid_argument("verify_sst_real: bad matrix");
  for (const cdouble& v : a.a)
    if (v.imag() != 0.0)
      throw std::invalid_argument("verify_sst_real: matrix must be real");
  validate_grid(eps_grid, "verify_sst_real", true);
  const int n = a.n;
  std::vector<double> reference;
  reference.reserve(eps_grid.size());
  for (double eps : eps_grid)
    reference.push_back(std::min(1.0, eps * std::sqrt(static_cast<double>(n))));
  return tail_scan(
      "sst-real", false, n, eps_grid, trials, spec, workers,
      [&a, n](Rng& r) {
        CMatrix g = sample_real_gaussian_std(n, r);
        return smallest_sv(a + g);
      },
      [](double s, double eps) { return s < eps; }, reference);
}

}  // namespace spectral
