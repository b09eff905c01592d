// Resolvent smallest-singular-value fields, contour extraction, grid-counted
// pseudospectrum areas, and the extrapolated small-epsilon area law.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "spectral/conditioning.hpp"
#include "spectral/linalg.hpp"
#include "spectral/pseudospectrum.hpp"
#include "support.hpp"

using namespace spectral;
using testsupport::random_dense;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

CMatrix scalar(cdouble v) {
  CMatrix m(1);
  m(0, 0) = v;
  return m;
}

CMatrix diag2(cdouble a, cdouble b) {
  CMatrix m(2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// smin(zI - J_2) in closed form as a function of r = |z|.
double j2_smin(double r) {
  return std::sqrt(r * r + 0.5 - std::sqrt(r * r + 0.25));
}

double shoelace(const std::vector<std::array<double, 2>>& poly) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k)
    s += poly[k][0] * poly[k + 1][1] - poly[k + 1][0] * poly[k][1];
  return std::abs(s) / 2.0;
}

}  // namespace

TEST_CASE("scalar field equals |z - lambda| on every node") {
  CMatrix m = scalar(cdouble(1.0, 0.0));
  SminField f = smin_field(m, cdouble(-0.5, -1.0), cdouble(2.5, 1.0), 31, 21, 2);
  REQUIRE(f.nx == 31);
  REQUIRE(f.ny == 21);
  REQUIRE(f.values.size() == 31u * 21u);
  CHECK(f.x_at(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f.x_at(30) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(f.y_at(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(f.y_at(20) == doctest::Approx(1.0).epsilon(1e-15));
  for (int iy = 0; iy < f.ny; ++iy)
    for (int ix = 0; ix < f.nx; ++ix) {
      double expect = std::abs(cdouble(f.x_at(ix), f.y_at(iy)) - cdouble(1.0, 0.0));
      CHECK(f.at(ix, iy) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("nilpotent 2x2 field matches its radial closed form") {
  CMatrix j = jordan_block(2);
  SminField f = smin_field(j, cdouble(-1.2, -1.2), cdouble(1.2, 1.2), 25, 25, 1);
  for (int iy = 0; iy < f.ny; ++iy)
    for (int ix = 0; ix < f.nx; ++ix) {
      double r = std::abs(cdouble(f.x_at(ix), f.y_at(iy)));
      CHECK(f.at(ix, iy) == doctest::Approx(j2_smin(r)).epsilon(1e-12));
    }
}

TEST_CASE("field is 1-Lipschitz across neighboring nodes") {
  CMatrix m = toeplitz_sample(6, 5);
  SminField f = smin_field(m, cdouble(-2.0, -2.0), cdouble(2.0, 2.0), 81, 61, 2);
  double dx = 4.0 / 80.0, dy = 4.0 / 60.0;
  for (int iy = 0; iy < f.ny; ++iy)
    for (int ix = 0; ix < f.nx; ++ix) {
      if (ix + 1 < f.nx)
        CHECK(std::abs(f.at(ix + 1, iy) - f.at(ix, iy)) <= dx + 1e-12);
      if (iy + 1 < f.ny)
        CHECK(std::abs(f.at(ix, iy + 1) - f.at(ix, iy)) <= dy + 1e-12);
    }
}

TEST_CASE("threaded field matches the serial reference bitwise") {
  for (unsigned seed : {1u, 9u}) {
    CMatrix m = random_dense(5, seed);
    SminField par = smin_field(m, cdouble(-2.0, -1.5), cdouble(2.0, 1.5), 64, 48, 3);
    SminField ser = smin_field_serial(m, cdouble(-2.0, -1.5), cdouble(2.0, 1.5), 64, 48);
    REQUIRE(par.values.size() == ser.values.size());
    CHECK(std::equal(par.values.begin(), par.values.end(), ser.values.begin()));
  }
}

TEST_CASE("field rejects oversized grids") {
  CMatrix m = scalar(cdouble(0.0, 0.0));
  CHECK_THROWS_AS(
      (void)smin_field(m, cdouble(0, 0), cdouble(1, 1), 7000, 7000, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)smin_field(m, cdouble(0, 0), cdouble(1, 1), 1, 5, 1),
      std::invalid_argument);
}

TEST_CASE("contours of a scalar matrix are circles of the level radius") {
  CMatrix m = scalar(cdouble(1.0, 0.0));
  SminField f = smin_field(m, cdouble(0.0, -1.0), cdouble(2.0, 1.0), 161, 161, 2);
  ContourSet cs = contours(f, {0.5, 0.25});
  REQUIRE(cs.levels == std::vector<double>{0.5, 0.25});
  REQUIRE(cs.polylines.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    REQUIRE(cs.polylines[k].size() == 1);  // one closed loop per level
    const auto& loop = cs.polylines[k][0];
    REQUIRE(loop.size() >= 16);
    CHECK(loop.front() == loop.back());
    for (const auto& v : loop) {
      double r = std::abs(cdouble(v[0], v[1]) - cdouble(1.0, 0.0));
      CHECK(r == doctest::Approx(cs.levels[k]).epsilon(5e-3));
    }
    CHECK(shoelace(loop) ==
          doctest::Approx(kPi * cs.levels[k] * cs.levels[k]).epsilon(0.01));
  }
  CHECK_THROWS_AS((void)contours(f, {0.25, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)contours(f, {0.5, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS((void)contours(f, {}), std::invalid_argument);
}

TEST_CASE("small levels around well-separated eigenvalues give one loop each") {
  CMatrix m = diag2(1.0, 2.0);
  SminField f = smin_field(m, cdouble(0.5, -0.6), cdouble(2.5, 0.6), 201, 121, 2);
  ContourSet cs = contours(f, {0.1});
  REQUIRE(cs.polylines.size() == 1);
  CHECK(cs.polylines[0].size() == 2);
  double total = 0.0;
  for (const auto& loop : cs.polylines[0]) {
    CHECK(loop.front() == loop.back());
    total += shoelace(loop);
  }
  CHECK(total == doctest::Approx(2.0 * kPi * 0.01).epsilon(0.02));
}

TEST_CASE("contour area and grid-counted area agree on the nilpotent block") {
  // Level set of the 2x2 nilpotent block at eps is the circle of radius
  // sqrt(eps^2 + eps).
  double eps = 0.3;
  double exact = kPi * (eps * eps + eps);
  CMatrix j = jordan_block(2);
  SminField f = smin_field(j, cdouble(-1.0, -1.0), cdouble(1.0, 1.0), 201, 201, 2);
  ContourSet cs = contours(f, {eps});
  REQUIRE(cs.polylines[0].size() == 1);
  double from_contour = shoelace(cs.polylines[0][0]);
  CHECK(from_contour == doctest::Approx(exact).epsilon(0.01));
  double from_grid = pseudospectrum_area(
      j, eps, RegionSpec::disk(cdouble(0.0, 0.0), 1.0), 2001, 2);
  CHECK(from_grid == doctest::Approx(exact).epsilon(0.005));
  CHECK(from_grid == doctest::Approx(from_contour).epsilon(0.012));
}

TEST_CASE("grid-counted areas match hand values for normal matrices") {
  // A normal matrix's eps-sublevel set is the exact union of eps-disks.
  double a1 = pseudospectrum_area(scalar(cdouble(1.0, 0.0)), 0.3,
                                  RegionSpec::disk(cdouble(1.0, 0.0), 1.0),
                                  1200, 2);
  CHECK(a1 == doctest::Approx(kPi * 0.09).epsilon(0.02));

  // Region strictly inside the sublevel set: every region cell counts.
  double a2 = pseudospectrum_area(scalar(cdouble(1.0, 0.0)), 0.3,
                                  RegionSpec::disk(cdouble(1.0, 0.0), 0.15),
                                  1200, 2);
  CHECK(a2 == doctest::Approx(kPi * 0.15 * 0.15).epsilon(0.02));

  // Two separated unit-condition eigenvalues: ratio 2.
  double eps = 0.05;
  double a3 = pseudospectrum_area(diag2(cdouble(1.0, 0.0), cdouble(0.0, 1.0)),
                                  eps, RegionSpec::disk(cdouble(0.0, 0.0), 3.0),
                                  8192, 2);
  CHECK(a3 / (kPi * eps * eps) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("pruned area equals the naive reference exactly") {
  struct Case {
    CMatrix m;
    double eps;
    RegionSpec region;
    std::int64_t res;
  };
  std::vector<Case> cases;
  cases.push_back({toeplitz_sample(8, 2), 0.15,
                   RegionSpec::disk(cdouble(0.0, 0.0), 2.0), 301});
  cases.push_back({toeplitz_sample(8, 2), 0.15,
                   RegionSpec::rect(cdouble(-1.3, -0.9), cdouble(1.1, 1.7)), 256});
  cases.push_back({diag2(cdouble(1.0, 0.0), cdouble(0.0, 1.0)), 0.4,
                   RegionSpec::disk(cdouble(0.5, 0.5), 1.5), 243});
  cases.push_back({jordan_block(5), 0.05,
                   RegionSpec::rect(cdouble(-1.0, -1.0), cdouble(1.0, 1.0)), 222});
  cases.push_back({random_dense(4, 77), 0.25,
                   RegionSpec::disk(cdouble(-0.2, 0.3), 2.5), 199});
  for (const Case& c : cases) {
    double ref = pseudospectrum_area_reference(c.m, c.eps, c.region, c.res);
    for (int workers : {1, 4}) {
      double fast = pseudospectrum_area(c.m, c.eps, c.region, c.res, workers);
      CHECK(fast == ref);  // bitwise: both count the same cells
    }
  }
}

TEST_CASE("area is monotone in epsilon") {
  CMatrix m = toeplitz_sample(6, 11);
  RegionSpec region = RegionSpec::disk(cdouble(0.0, 0.0), 2.0);
  double prev = 0.0;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4}) {
    double a = pseudospectrum_area(m, eps, region, 701, 2);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(prev > 0.0);
}

TEST_CASE("area rejects bad arguments") {
  CMatrix m = diag2(1.0, 2.0);
  RegionSpec region = RegionSpec::disk(cdouble(0.0, 0.0), 1.0);
  CHECK_THROWS_AS((void)pseudospectrum_area(m, 0.0, region, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pseudospectrum_area(m, 0.1, region, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("extrapolated ratio recovers the squared-condition sum") {
  // Normal pair: target 2 over a disk holding both eigenvalues.
  LimitEstimate e1 = limiting_overlap_estimate(
      diag2(cdouble(1.0, 0.0), cdouble(0.0, 1.0)),
      RegionSpec::disk(cdouble(0.0, 0.0), 3.0), {0.08, 0.04, 0.02}, 2);
  CHECK(e1.converged);
  CHECK(e1.value == doctest::Approx(2.0).epsilon(0.05));
  REQUIRE(e1.ratios.size() == 3);
  REQUIRE(e1.extrapolants.size() == 2);

  // Non-normal upper-triangular pair: each condition number sqrt(2), sum 4.
  CMatrix t(2);
  t(0, 0) = 1.0;
  t(0, 1) = 1.0;
  t(1, 1) = 2.0;
  LimitEstimate e2 = limiting_overlap_estimate(
      t, RegionSpec::disk(cdouble(0.0, 0.0), 3.0), {0.04, 0.02, 0.01}, 2);
  CHECK(e2.converged);
  CHECK(e2.value == doctest::Approx(4.0).epsilon(0.05));

  // Region holding only one of two unit-condition eigenvalues: target 1,
  // default five-step schedule.
  LimitEstimate e3 = limiting_overlap_estimate(
      diag2(1.0, 2.0), RegionSpec::disk(cdouble(1.0, 0.0), 0.5), {}, 2);
  CHECK(e3.converged);
  CHECK(e3.value == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(e3.eps_schedule.size() == 5);
  CHECK(e3.eps_schedule[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(e3.eps_schedule[4] == doctest::Approx(0.00625).epsilon(1e-12));
  REQUIRE(e3.ratios.size() == 5);
  REQUIRE(e3.extrapolants.size() == 4);
}

TEST_CASE("extrapolation agrees with the overlap sum on dense samples") {
  for (unsigned seed : {31u, 57u}) {
    CMatrix a = random_dense(4, seed);
    SpectralData sd = eig(a);
    double max_abs = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
      max_abs = std::max(max_abs, std::abs(sd.eigenvalues[i]));
      for (std::size_t j = i + 1; j < sd.eigenvalues.size(); ++j)
        min_gap = std::min(min_gap,
                           std::abs(sd.eigenvalues[i] - sd.eigenvalues[j]));
    }
    REQUIRE(min_gap > 0.05);  // seeds chosen with a usable spectral gap
    RegionSpec region = RegionSpec::disk(cdouble(0.0, 0.0), max_abs + 1.0);
    double g = min_gap / 12.0;
    LimitEstimate est =
        limiting_overlap_estimate(a, region, {g, g / 2.0, g / 4.0}, 2);
    double target = conditioning_report(sd).overlap_sum;
    CHECK(est.value == doctest::Approx(target).epsilon(0.08));
  }
}

TEST_CASE("divergent ratios are reported as non-converged") {
  // A defective eigenvalue makes area/(pi eps^2) blow up like 1/eps; halving
  // eps roughly doubles the ratio, so the extrapolants never settle.
  CMatrix m(2);
  m(0, 1) = 5.0;
  LimitEstimate est = limiting_overlap_estimate(
      m, RegionSpec::disk(cdouble(0.0, 0.0), 1.0), {0.2, 0.1, 0.05}, 2);
  CHECK_FALSE(est.converged);
  CHECK(est.ratios[1] > 1.5 * est.ratios[0]);
  CHECK(est.ratios[2] > 1.5 * est.ratios[1]);
}

TEST_CASE("schedule validation") {
  CMatrix m = diag2(1.0, 2.0);
  RegionSpec region = RegionSpec::disk(cdouble(0.0, 0.0), 3.0);
  CHECK_THROWS_AS(
      (void)limiting_overlap_estimate(m, region, {0.1}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)limiting_overlap_estimate(m, region, {0.1, 0.2}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)limiting_overlap_estimate(m, region, {0.1, 0.0}, 1),
      std::invalid_argument);
  // Scalar matrices have no spectral gap to key the default schedule from.
  CHECK_THROWS_AS((void)default_eps_schedule(scalar(cdouble(1.0, 0.0))),
                  std::invalid_argument);
}
