#include "spectral/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectral/ensembles.hpp"
#include "spectral/linalg.hpp"
#include "spectral/parallel.hpp"

namespace spectral {

namespace {

// Proposals are rejected (and the step halved) when any gap in the
// integrated coordinates falls below this, or, for the real variant, any
// coordinate falls below the value floor.
constexpr double kCollisionTol = 1e-6;
constexpr double kValueFloor = 1e-8;

void require_strictly_decreasing(const std::vector<double>& v,
                                 const char* what) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i] > v[i + 1]))
      throw std::invalid_argument(std::string(what) +
                                  ": coordinates must be strictly decreasing");
}

}  // namespace

std::vector<double> drift_complex(const std::vector<double>& s, int n) {
  if (static_cast<int>(s.size()) != n || n < 1)
    throw std::invalid_argument("drift_complex: size mismatch");
  require_strictly_decreasing(s, "drift_complex");
  for (double v : s)
    if (!(v > 0.0))
      throw std::invalid_argument("drift_complex: coordinates must be positive");
  std::vector<double> drift(s.size());
  const double nd = static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    double interaction = 0.0;
    double si2 = s[i] * s[i];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double sj2 = s[j] * s[j];
      interaction += (si2 + sj2) / (nd * (si2 - sj2));
    }
    drift[static_cast<std::size_t>(i)] =
        (1.0 - 0.5 / nd + interaction) / (2.0 * s[i]);
  }
  return drift;
}

RealWishartCoeffs drift_real_wishart(const std::vector<double>& lambda, int n) {
  if (static_cast<int>(lambda.size()) != n || n < 1)
    throw std::invalid_argument("drift_real_wishart: size mismatch");
  require_strictly_decreasing(lambda, "drift_real_wishart");
  for (double v : lambda)
    if (!(v >= 0.0))
      throw std::invalid_argument("drift_real_wishart: coordinates must be >= 0");
  RealWishartCoeffs c;
  c.drift.resize(lambda.size());
  c.diffusion.resize(lambda.size());
  for (int i = 0; i < n; ++i) {
    double interaction = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      interaction += (lambda[i] + lambda[j]) / (lambda[i] - lambda[j]);
    }
    c.drift[static_cast<std::size_t>(i)] = 1.0 + interaction;
    c.diffusion[static_cast<std::size_t>(i)] =
        2.0 * std::sqrt(lambda[i]) / static_cast<double>(n);
  }
  return c;
}

bool quasi_monotone_check(const std::vector<double>& l1,
                          const std::vector<double>& l2, int i) {
  if (l1.size() != l2.size() || l1.empty())
    throw std::invalid_argument("quasi_monotone_check: size mismatch");
  if (i < 0 || i >= static_cast<int>(l1.size()))
    throw std::invalid_argument("quasi_monotone_check: index out of range");
  require_strictly_decreasing(l1, "quasi_monotone_check");
  require_strictly_decreasing(l2, "quasi_monotone_check");
  for (std::size_t k = 0; k < l1.size(); ++k) {
    if (!(l1[k] >= 0.0) || !(l2[k] >= 0.0))
      throw std::invalid_argument("quasi_monotone_check: coordinates must be >= 0");
    if (l1[k] > l2[k])
      throw std::invalid_argument(
          "quasi_monotone_check: requires l1 <= l2 componentwise");
  }
  if (l1[static_cast<std::size_t>(i)] != l2[static_cast<std::size_t>(i)])
    throw std::invalid_argument(
        "quasi_monotone_check: coordinate i must agree in both configurations");
  const int n = static_cast<int>(l1.size());
  auto a_i = [&](const std::vector<double>& l) {
    double sum = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += (l[static_cast<std::size_t>(i)] + l[static_cast<std::size_t>(j)]) /
             (l[static_cast<std::size_t>(i)] - l[static_cast<std::size_t>(j)]);
    }
    return sum;
  };
  return a_i(l1) <= a_i(l2) + 1e-12;
}

namespace {

struct Flow {
  SdeVariant variant;
  int n;

  // Drift and diffusion of the integrated coordinates: s itself for the
  // complex variant, lambda = sigma^2 for the real one. The conventional
  // real-Wishart presentation describes the flow before time is rescaled by
  // n; matching the law of the squared singular values of A + sqrt(t) G
  // (G entries N(0, 1/n)) takes drift 1 + (a_i - 1)/n and diffusion
  // 2 sqrt(lambda_i)/sqrt(n), which coincide with it at n = 1.
  void coeffs(const std::vector<double>& x, std::vector<double>& drift,
              std::vector<double>& diff) const {
    if (variant == SdeVariant::complex_singular) {
      drift = drift_complex(x, n);
      diff.assign(x.size(), 1.0 / std::sqrt(2.0 * n));
      return;
    }
    RealWishartCoeffs c = drift_real_wishart(x, n);
    const double nd = static_cast<double>(n);
    drift.resize(x.size());
    diff.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      drift[i] = 1.0 + (c.drift[i] - 1.0) / nd;
      diff[i] = 2.0 * std::sqrt(x[i]) / std::sqrt(nd);
    }
  }

  bool valid(const std::vector<double>& x) const {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
      if (!(x[i] - x[i + 1] >= kCollisionTol)) return false;
    if (variant == SdeVariant::real_wishart) {
      if (!(x.back() >= kValueFloor)) return false;
    } else {
      if (!(x.back() > 0.0)) return false;
    }
    return true;
  }

  std::vector<double> to_integrated(const std::vector<double>& sigma) const {
    if (variant == SdeVariant::complex_singular) return sigma;
    std::vector<double> lambda(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
      lambda[i] = sigma[i] * sigma[i];
    return lambda;
  }

  std::vector<double> to_sigma(const std::vector<double>& x) const {
    if (variant == SdeVariant::complex_singular) return x;
    std::vector<double> sigma(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sigma[i] = std::sqrt(x[i]);
    return sigma;
  }
};

struct SingleEndpoint {
  std::vector<double> sigma;
  bool completed = false;
};

// One path of the flow; same stepping policy as couple_evolve with the pair
// validity collapsed to one process.
SingleEndpoint evolve_single(const std::vector<double>& sigma_init,
                             double t_final, std::int64_t steps,
                             SdeVariant variant, Rng rng) {
  Flow flow{variant, static_cast<int>(sigma_init.size())};
  std::vector<double> x = flow.to_integrated(sigma_init);
  if (!flow.valid(x))
    throw std::invalid_argument(
        "sde: initial condition violates gap or floor constraints");
  const double h_base = t_final / static_cast<double>(steps);
  const double h_floor = 1e-12 * t_final;
  double t = 0.0;
  double h = h_base;
  std::vector<double> drift, diff, xi(x.size()), proposal(x.size());
  SingleEndpoint out;
  while (t < t_final) {
    double h_eff = std::min(h, t_final - t);
    for (double& g : xi) g = rng.next_gaussian();
    flow.coeffs(x, drift, diff);
    double sq = std::sqrt(h_eff);
    for (std::size_t i = 0; i < x.size(); ++i)
      proposal[i] = x[i] + h_eff * drift[i] + sq * diff[i] * xi[i];
    if (flow.valid(proposal)) {
      x = proposal;
      t += h_eff;
      h = std::min(h_base, 2.0 * h);
    } else {
      h = 0.5 * h_eff;
      if (h < h_floor) {
        out.sigma = flow.to_sigma(x);
        out.completed = false;
        return out;
      }
    }
  }
  out.sigma = flow.to_sigma(x);
  out.completed = true;
  return out;
}

}  // namespace

CoupledPaths couple_evolve(const std::vector<double>& init1,
                           const std::vector<double>& init2, double t_final,
                           std::int64_t steps, SdeVariant variant, Rng rng) {
  if (init1.size() != init2.size() || init1.empty())
    throw std::invalid_argument("couple_evolve: init size mismatch");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("couple_evolve: bad t_final");
  if (steps < 1) throw std::invalid_argument("couple_evolve: steps must be >= 1");
  require_strictly_decreasing(init1, "couple_evolve init1");
  require_strictly_decreasing(init2, "couple_evolve init2");
  for (std::size_t i = 0; i < init1.size(); ++i) {
    if (!(init1[i] > 0.0) || !(init2[i] > 0.0))
      throw std::invalid_argument("couple_evolve: inits must be positive");
    if (init1[i] > init2[i])
      throw std::invalid_argument(
          "couple_evolve: requires init1 <= init2 componentwise");
  }

  const int n = static_cast<int>(init1.size());
  Flow flow{variant, n};
  std::vector<double> x1 = flow.to_integrated(init1);
  std::vector<double> x2 = flow.to_integrated(init2);
  if (!flow.valid(x1) || !flow.valid(x2))
    throw std::invalid_argument(
        "couple_evolve: initial condition violates gap or floor constraints");

  CoupledPaths out;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.path1.push_back(flow.to_sigma(x1));
    out.path2.push_back(flow.to_sigma(x2));
  };
  record(0.0);

  const double h_base = t_final > 0.0 ? t_final / static_cast<double>(steps) : 0.0;
  const double h_floor = 1e-12 * t_final;
  double t = 0.0;
  double h = h_base;
  std::vector<double> d1, f1, d2, f2, xi(static_cast<std::size_t>(n));
  std::vector<double> y1(x1.size()), y2(x2.size());
  out.completed = true;
  while (t < t_final) {
    double h_eff = std::min(h, t_final - t);
    // One shared Gaussian increment vector drives both processes; a rejected
    // step discards it and retries smaller with fresh noise.
    for (double& g : xi) g = rng.next_gaussian();
    flow.coeffs(x1, d1, f1);
    flow.coeffs(x2, d2, f2);
    double sq = std::sqrt(h_eff);
    for (std::size_t i = 0; i < x1.size(); ++i) {
      y1[i] = x1[i] + h_eff * d1[i] + sq * f1[i] * xi[i];
      y2[i] = x2[i] + h_eff * d2[i] + sq * f2[i] * xi[i];
    }
    if (flow.valid(y1) && flow.valid(y2)) {
      x1 = y1;
      x2 = y2;
      t += h_eff;
      out.max_step_used = std::max(out.max_step_used, h_eff);
      record(t);
      h = std::min(h_base, 2.0 * h);
    } else {
      h = 0.5 * h_eff;
      if (h < h_floor) {
        out.completed = false;
        break;
      }
    }
  }
  out.t_reached = t;

  out.tol_ord = 10.0 * std::sqrt(out.max_step_used) / static_cast<double>(n);
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      double diff = out.path1[k][static_cast<std::size_t>(i)] -
                    out.path2[k][static_cast<std::size_t>(i)];
      if (diff > out.tol_ord) {
        ++out.ordering_violation_count;
        out.max_violation = std::max(out.max_violation, diff);
      }
    }
  }
  return out;
}

MarginalReport marginal_law_check(const CMatrix& a, double t,
                                  std::int64_t trials, std::int64_t steps,
                                  SdeVariant variant, const RngSpec& spec,
                                  int workers) {
  if (a.n < 1 || !a.finite())
    throw std::invalid_argument("marginal_law_check: bad matrix");
  if (!(t >= 0.0))
    throw std::invalid_argument("marginal_law_check: t must be >= 0");
  if (trials < 2)
    throw std::invalid_argument("marginal_law_check: trials must be >= 2");
  if (steps < 1)
    throw std::invalid_argument("marginal_law_check: steps must be >= 1");
  if (variant == SdeVariant::real_wishart) {
    for (const cdouble& v : a.a)
      if (v.imag() != 0.0)
        throw std::invalid_argument(
            "marginal_law_check: real variant needs a real matrix");
  }

  const int n = a.n;
  std::vector<double> s0 = svd(a).singular_values;
  bool zero_a = std::all_of(s0.begin(), s0.end(),
                            [](double v) { return v == 0.0; });
  if (zero_a) {
    // Distinct positive seeds so the integrator starts in its valid domain;
    // offsets are far below the endpoint scale sqrt(t), so the endpoint law
    // is unaffected at test resolution.
    double unit = variant == SdeVariant::complex_singular ? 1e-4 : 1e-3;
    for (int i = 0; i < n; ++i)
      s0[static_cast<std::size_t>(i)] = unit * static_cast<double>(n - i);
  }

  MarginalReport rep;
  rep.variant = variant;
  rep.n = n;
  rep.t = t;
  rep.trials = trials;
  rep.steps = steps;

  std::vector<double> endpoints(static_cast<std::size_t>(trials) * n);
  std::vector<double> direct(static_cast<std::size_t>(trials) * n);
  std::vector<char> incomplete(static_cast<std::size_t>(trials), 0);

  Rng root(spec);
  Rng sde_root = root.substream(0);
  Rng direct_root = root.substream(1);
  const double sqrt_t = std::sqrt(t);
  parallel_for(trials, workers, [&](std::int64_t trial) {
    SingleEndpoint end =
        evolve_single(s0, t, steps, variant,
                      sde_root.substream(static_cast<std::uint64_t>(trial)));
    if (!end.completed) incomplete[static_cast<std::size_t>(trial)] = 1;
    for (int i = 0; i < n; ++i)
      endpoints[static_cast<std::size_t>(trial) * n + i] =
          end.sigma[static_cast<std::size_t>(i)];

    Rng dr = direct_root.substream(static_cast<std::uint64_t>(trial));
    CMatrix g = variant == SdeVariant::complex_singular
                    ? sample_complex_ginibre(n, dr)
                    : sample_real_ginibre(n, dr);
    CMatrix m = a + cdouble(sqrt_t, 0.0) * g;
    std::vector<double> sv = svd(m).singular_values;
    for (int i = 0; i < n; ++i)
      direct[static_cast<std::size_t>(trial) * n + i] =
          sv[static_cast<std::size_t>(i)];
  });

  for (char c : incomplete) rep.incomplete_paths += c;

  rep.pass = rep.incomplete_paths == 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> sample_sde(static_cast<std::size_t>(trials));
    std::vector<double> sample_direct(static_cast<std::size_t>(trials));
    for (std::int64_t trial = 0; trial < trials; ++trial) {
      sample_sde[static_cast<std::size_t>(trial)] =
          endpoints[static_cast<std::size_t>(trial) * n + i];
      sample_direct[static_cast<std::size_t>(trial)] =
          direct[static_cast<std::size_t>(trial) * n + i];
    }
    KsResult ks = ks_two_sample(sample_sde, sample_direct);
    rep.ks_d.push_back(ks.d);
    rep.ks_p.push_back(ks.p);
    double adj = std::min(1.0, ks.p * static_cast<double>(n));
    rep.ks_p_adj.push_back(adj);
    if (!(adj > 0.01)) rep.pass = false;
  }

  if (zero_a && variant == SdeVariant::complex_singular && t > 0.0) {
    std::vector<double> smallest(static_cast<std::size_t>(trials));
    for (std::int64_t trial = 0; trial < trials; ++trial)
      smallest[static_cast<std::size_t>(trial)] =
          endpoints[static_cast<std::size_t>(trial) * n + (n - 1)];
    // sigma(sqrt(t) G) = sqrt(t) sigma(G), so the exact smallest-value law
    // applies after rescaling by sqrt(t).
    auto cdf = [n, sqrt_t](double x) {
      return smin_cdf_exact(n, x / sqrt_t);
    };
    KsResult ks = ks_one_sample(smallest, cdf);
    rep.smallest_vs_exact = ks;
    if (!(ks.p > 0.01)) rep.pass = false;
  }
  return rep;
}

nlohmann::json marginal_report_to_json(const MarginalReport& r) {
  nlohmann::json j{
      {"variant",
       r.variant == SdeVariant::complex_singular ? "complex" : "real"},
      {"n", r.n},
      {"t", r.t},
      {"trials", r.trials},
      {"steps", r.steps},
      {"ks_d", r.ks_d},
      {"ks_p", r.ks_p},
      {"ks_p_adj", r.ks_p_adj},
      {"incomplete_paths", r.incomplete_paths},
      {"pass", r.pass}};
  if (r.smallest_vs_exact)
    j["smallest_vs_exact"] = {{"d", r.smallest_vs_exact->d},
                              {"p", r.smallest_vs_exact->p}};
  return j;
}

}  // namespace spectral
