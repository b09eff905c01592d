// End-to-end acceptance checks. Each case prints one
//   [acceptance] NN <label> PASS|FAIL
// line; the ctest entries acceptance_01..acceptance_12 run them one by one.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spectral/conditioning.hpp"
#include "spectral/ensembles.hpp"
#include "spectral/linalg.hpp"
#include "spectral/pseudospectrum.hpp"
#include "spectral/regularize.hpp"
#include "spectral/runner.hpp"
#include "spectral/sde.hpp"
#include "support.hpp"

using namespace spectral;

namespace {

bool announce(int num, const char* label, bool ok) {
  std::printf("[acceptance] %02d %s %s\n", num, label, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  return ok;
}

CMatrix unit_norm_dense4(unsigned seed) {
  CMatrix a = testsupport::random_dense(4, seed);
  double norm = operator_norm(a);
  return (cdouble(1.0 / (norm * (1.0 + 1e-9)), 0.0)) * a;
}

}  // namespace

TEST_CASE("criterion 01 constrained optimum constants") {
  StOptimum opt = optimize_st();
  bool t_ok = std::abs(opt.t - 3.7487194953216676) <= 1e-3;
  bool obj_ok = std::abs(opt.objective - 3.8821705289540094) <= 1e-3;
  CHECK(t_ok);
  CHECK(obj_ok);
  CHECK(announce(1, "constrained optimum constants", t_ok && obj_ok));
}

TEST_CASE("criterion 02 exact smallest-singular-value law") {
  const std::vector<double> probs = {0.02, 0.05, 0.1,  0.2, 0.35,
                                     0.5,  0.65, 0.8,  0.9, 0.95};
  bool ok = true;
  for (int n : {2, 5, 10}) {
    std::vector<double> grid;
    for (double p : probs)
      grid.push_back(std::sqrt(-std::log1p(-p)) / static_cast<double>(n));
    TailReport rep = verify_smin_law(n, grid, 100000,
                                     RngSpec{1000u + static_cast<unsigned>(n), 0},
                                     2);
    CHECK(rep.pass_fraction >= 0.9);
    CHECK(rep.pass);
    ok = ok && rep.pass;
  }
  CHECK(announce(2, "exact smallest-singular-value law", ok));
}

TEST_CASE("criterion 03 expected overlap mass under the volume bound") {
  RegionSpec ball = RegionSpec::disk(cdouble(0.0, 0.0), 2.0);
  std::vector<CMatrix> mats;
  mats.push_back(zero_matrix(4));
  mats.push_back(jordan_block(4));
  mats.push_back(unit_norm_dense4(123));
  bool ok = true;
  std::uint64_t stream = 0;
  for (const CMatrix& a : mats) {
    for (double delta : {0.3, 0.7}) {
      TheoremBReport rep =
          verify_theorem_b(a, delta, ball, 2000, RngSpec{300, stream++}, 2);
      CHECK(rep.pass);
      ok = ok && rep.pass;
    }
  }
  CHECK(announce(3, "expected overlap mass under the volume bound", ok));
}

TEST_CASE("criterion 04 total squared-condition mass at n = 50") {
  BulkProfileReport rep = bulk_overlap_profile(50, 200, 10, RngSpec{0, 0}, 2);
  bool ok = rep.total_over_n2 >= 0.15;
  CHECK(rep.total_over_n2 >= 0.15);
  CHECK(announce(4, "total squared-condition mass at n = 50", ok));
}

TEST_CASE("criterion 05 radial overlap profile matches 1 - r^2") {
  BulkProfileReport rep = bulk_overlap_profile(50, 200, 10, RngSpec{0, 0}, 2);
  bool ok = true;
  for (int k : {1, 5}) {  // bins centered at r = 0.1 and r = 0.5
    double r = rep.centers[static_cast<std::size_t>(k)];
    double err = std::abs(rep.mean_overlap_over_n[static_cast<std::size_t>(k)] -
                          (1.0 - r * r));
    CHECK(err <= 0.12);
    ok = ok && err <= 0.12;
  }
  CHECK(announce(5, "radial overlap profile matches 1 - r^2", ok));
}

TEST_CASE("criterion 06 small-epsilon area law on a non-normal matrix") {
  CMatrix t(2);
  t(0, 0) = 1.0;
  t(0, 1) = 1.0;
  t(1, 1) = 2.0;
  LimitEstimate est = limiting_overlap_estimate(
      t, RegionSpec::disk(cdouble(0.0, 0.0), 3.0), {}, 2);
  bool ok = est.converged && std::abs(est.value - 4.0) <= 0.2;
  CHECK(est.converged);
  CHECK(std::abs(est.value - 4.0) <= 0.2);
  CHECK(announce(6, "small-epsilon area law on a non-normal matrix", ok));
}

TEST_CASE("criterion 07 certified regularization across 100 seeds") {
  CMatrix a = jordan_block(10);
  const double bound = 4.0 * std::pow(10.0, 1.5) * 11.0;
  int certified = 0;
  bool bounds_ok = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RegularizationResult r = regularize(a, 0.1, 100, RngSpec{seed, 0});
    if (!r.certificate) continue;
    ++certified;
    bool good =
        r.norm_E <= 0.1 + 1e-12 && r.kappa_V_after <= bound + 1e-9;
    CHECK(good);
    bounds_ok = bounds_ok && good;
  }
  CHECK(certified >= 99);
  bool ok = certified >= 99 && bounds_ok;
  CHECK(announce(7, "certified regularization across 100 seeds", ok));
}

TEST_CASE("criterion 08 defectivity decay rate of the minimal condition") {
  JordanScanReport rep = jordan_scan(4, {1e-1, 1e-2, 1e-3, 1e-4}, 50,
                                     RngSpec{800, 0}, 2);
  bool ok = rep.slope >= 0.60 && rep.slope <= 1.05;
  CHECK(rep.slope >= 0.60);
  CHECK(rep.slope <= 1.05);
  CHECK(announce(8, "defectivity decay rate of the minimal condition", ok));
}

TEST_CASE("criterion 09 coupled paths stay ordered across 100 seeds") {
  bool ok = true;
  for (SdeVariant variant :
       {SdeVariant::complex_singular, SdeVariant::real_wishart}) {
    bool real = variant == SdeVariant::real_wishart;
    // The upper path starts well above the lower one: with shared noise the
    // pathwise difference contracts, so nearly-equal starts would collide
    // with the discretization floor long before t = 0.5.
    std::vector<double> lo = real ? std::vector<double>{3e-2, 2e-2, 1e-2}
                                  : std::vector<double>{3e-4, 2e-4, 1e-4};
    std::vector<double> hi = {1.5, 1.0, 0.5};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      CoupledPaths cp = couple_evolve(lo, hi, 0.5, 10000, variant,
                                      Rng(seed, real ? 1 : 0));
      bool good = cp.completed && cp.ordering_violation_count == 0;
      if (real) {
        for (const auto& slice : cp.path1)
          for (double v : slice) good = good && v >= 0.0;
        for (const auto& slice : cp.path2)
          for (double v : slice) good = good && v >= 0.0;
      }
      CHECK(good);
      ok = ok && good;
    }
  }
  CHECK(announce(9, "coupled paths stay ordered across 100 seeds", ok));
}

TEST_CASE("criterion 10 endpoint law of the singular-value flow") {
  MarginalReport cx = marginal_law_check(zero_matrix(2), 1.0, 10000, 2000,
                                         SdeVariant::complex_singular,
                                         RngSpec{1000, 0}, 2);
  bool cx_ok = cx.pass && cx.smallest_vs_exact.has_value() &&
               cx.smallest_vs_exact->p > 0.01;
  CHECK(cx.pass);
  CHECK(cx_ok);

  CMatrix a(2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  MarginalReport re = marginal_law_check(a, 0.25, 10000, 2000,
                                         SdeVariant::real_wishart,
                                         RngSpec{1000, 1}, 2);
  CHECK(re.pass);
  bool ok = cx_ok && re.pass;
  CHECK(announce(10, "endpoint law of the singular-value flow", ok));
}

TEST_CASE("criterion 11 real additive-noise invertibility bound") {
  std::vector<double> grid = {0.01, 0.05, 0.1};
  CMatrix zero3 = zero_matrix(3);
  CMatrix big(3);
  for (int i = 0; i < 3; ++i) big(i, i) = 10.0;
  bool ok = true;
  std::uint64_t stream = 0;
  for (const CMatrix& a : {zero3, big}) {
    TailReport rep = verify_sst_real(a, grid, 100000, RngSpec{1100, stream++}, 2);
    CHECK(rep.pass);
    ok = ok && rep.pass;
  }
  CHECK(announce(11, "real additive-noise invertibility bound", ok));
}

TEST_CASE("criterion 12 every command reruns byte-identically") {
  const std::vector<std::string> configs = {
      R"acc({"command": "optimize-st"})acc",
      R"acc({"command": "tails", "law": "smin-exact", "n": 2,
             "eps_grid": [0.3, 0.6], "trials": 2000,
             "rng": {"seed": 1, "stream": 0}})acc",
      R"acc({"command": "tails", "law": "sst-real", "matrix": "zero(3)",
             "eps_grid": [0.05, 0.1], "trials": 2000,
             "rng": {"seed": 2, "stream": 0}})acc",
      R"acc({"command": "regularize", "matrix": "jordan(6)", "delta": 0.2,
             "attempts": 6, "davies_epsilon": 0.04,
             "rng": {"seed": 3, "stream": 0}})acc",
      R"acc({"command": "verify-theorem-b", "matrix": "jordan(3)",
             "delta": 0.4,
             "region": {"disk": {"center": [0.0, 0.0], "radius": 2.0}},
             "trials": 300, "rng": {"seed": 4, "stream": 0}})acc",
      R"acc({"command": "jordan-scan", "n": 4, "delta_list": [0.1, 0.01],
             "trials": 20, "rng": {"seed": 5, "stream": 0}})acc",
      R"acc({"command": "bulk-profile", "n": 12, "trials": 30, "r_bins": 8,
             "rng": {"seed": 6, "stream": 0}})acc",
      R"acc({"command": "sde-couple", "variant": "complex",
             "init1": [3e-4, 2e-4, 1e-4], "init2": [0.03, 0.02, 0.01],
             "t_final": 0.25, "steps": 2000, "runs": 2, "dump_paths": 1,
             "rng": {"seed": 7, "stream": 0}})acc",
      R"acc({"command": "sde-couple", "variant": "real",
             "init1": [0.03, 0.02, 0.01], "init2": [0.3, 0.2, 0.1],
             "t_final": 0.25, "steps": 2000, "runs": 1,
             "rng": {"seed": 8, "stream": 0}})acc",
      R"acc({"command": "sde-marginal", "matrix": "zero(2)",
             "variant": "complex", "t": 0.5, "trials": 400, "steps": 300,
             "rng": {"seed": 9, "stream": 0}})acc",
      R"acc({"command": "pseudospectrum", "matrix": "diag(1, 2)",
             "field": {"z0": [0.0, -0.8], "z1": [3.0, 0.8], "nx": 31,
                       "ny": 21, "levels": [0.5, 0.2]},
             "area": {"epsilon": 0.2,
                      "region": {"disk": {"center": [1.0, 0.0],
                                          "radius": 0.5}},
                      "resolution": 301},
             "limit": {"region": {"disk": {"center": [1.0, 0.0],
                                           "radius": 0.4}},
                       "eps_schedule": [0.1, 0.05, 0.025]},
             "perturb_delta": 0.3, "attempts": 4,
             "rng": {"seed": 10, "stream": 0}})acc",
  };
  bool ok = true;
  int idx = 0;
  for (const std::string& text : configs) {
    ExperimentConfig c = parse_config_text(text);
    std::string d1 = testsupport::scratch_dir("acc12a_" + std::to_string(idx));
    std::string d2 = testsupport::scratch_dir("acc12b_" + std::to_string(idx));
    ++idx;
    RunManifest m1 = run(c, d1);
    RunManifest m2 = rerun_from_manifest(d1 + "/manifest.json", d2);
    bool same = m1.artifacts == m2.artifacts;
    CHECK(same);
    if (same) {
      for (const std::string& name : m1.artifacts) {
        bool equal = testsupport::slurp(d1 + "/" + name) ==
                     testsupport::slurp(d2 + "/" + name);
        CHECK(equal);
        same = same && equal;
      }
    }
    ok = ok && same;
  }
  CHECK(announce(12, "every command reruns byte-identically", ok));
}
