#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spectral/detmath.hpp"
#include "spectral/rng.hpp"
#include "spectral/stats.hpp"

using namespace spectral;

namespace {

// Independent reference for the generator: the SplitMix64 finalizer and walk
// restated from scratch, so structural edits to the library's generator are
// caught against a second implementation.
std::uint64_t ref_mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct RefStream {
  std::uint64_t key;
  std::uint64_t state;
  explicit RefStream(std::uint64_t seed, std::uint64_t stream) {
    key = ref_mix64(seed ^ ref_mix64(stream ^ 0xA5A5A5A5A5A5A5A5ull));
    state = key;
  }
  RefStream child(std::uint64_t index) const {
    RefStream c(0, 0);
    c.key = ref_mix64(key ^ ref_mix64(index ^ 0xC3C3C3C3C3C3C3C3ull));
    c.state = c.key;
    return c;
  }
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    return ref_mix64(state - 0x9E3779B97F4A7C15ull);
  }
};

std::int64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  auto to_ordered = [](double x) {
    std::int64_t i = std::bit_cast<std::int64_t>(x);
    return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
  };
  std::int64_t da = to_ordered(a), db = to_ordered(b);
  return da > db ? da - db : db - da;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("deterministic log matches the standard library within 2 ulp") {
  // Sweep magnitudes from subnormal to huge; glibc log is correctly rounded,
  // the deterministic port is faithfully rounded, so they differ by <= 2 ulp.
  double x = 1e-300;
  while (x < 1e300) {
    double a = det_log(x);
    double b = std::log(x);
    INFO("x = ", x);
    CHECK(ulp_distance(a, b) <= 2);
    x *= 1.7000003;
  }
  // Dense sweep near 1 where log is most delicate.
  for (int k = -2000; k <= 2000; ++k) {
    double y = 1.0 + k * 1e-7;
    CHECK(ulp_distance(det_log(y), std::log(y)) <= 2);
  }
  // Subnormals exercise the 2^54 rescaling path.
  for (double s : {5e-324, 3e-320, 7.2e-310}) {
    CHECK(ulp_distance(det_log(s), std::log(s)) <= 2);
  }
}

TEST_CASE("deterministic log edge cases") {
  CHECK(det_log(1.0) == 0.0);
  CHECK(std::isinf(det_log(0.0)));
  CHECK(det_log(0.0) < 0.0);
  CHECK(std::isnan(det_log(-1.0)));
  CHECK(std::isinf(det_log(std::numeric_limits<double>::infinity())));
  CHECK(det_log(std::numeric_limits<double>::infinity()) > 0.0);
  CHECK(std::isnan(det_log(std::numeric_limits<double>::quiet_NaN())));
  CHECK(det_log(2.0) == doctest::Approx(0.6931471805599453).epsilon(1e-16));
}

TEST_CASE("raw stream follows the reference chain") {
  for (auto [seed, stream] : {std::pair<std::uint64_t, std::uint64_t>{0, 0},
                              {1, 0},
                              {0, 1},
                              {123456789, 987654321},
                              {~0ull, 17}}) {
    Rng rng(seed, stream);
    RefStream ref(seed, stream);
    for (int i = 0; i < 64; ++i) {
      INFO("seed ", seed, " stream ", stream, " draw ", i);
      CHECK(rng.next_u64() == ref.next());
    }
  }
}

TEST_CASE("stream snapshot is pinned") {
  // Frozen output of the shipped generator; any change to the constants or
  // the mixing breaks artifact reproducibility and must fail loudly.
  Rng rng(1, 0);
  std::uint64_t a = rng.next_u64();
  std::uint64_t b = rng.next_u64();
  RefStream ref(1, 0);
  CHECK(a == ref.next());
  CHECK(b == ref.next());
  CHECK(a != b);
  // (seed, stream) and (stream, seed) must not collide.
  Rng swapped(0, 1);
  CHECK(swapped.next_u64() != a);
}

TEST_CASE("substream derivation matches the reference and is stateless") {
  Rng parent(7, 3);
  RefStream ref(7, 3);
  // Deriving children does not consume parent state.
  Rng c0 = parent.substream(0);
  Rng c1 = parent.substream(1);
  Rng c0_again = parent.substream(0);
  CHECK(parent.next_u64() == ref.next());

  RefStream r0 = ref.child(0), r1 = ref.child(1);
  CHECK(c0.next_u64() == r0.next());
  CHECK(c1.next_u64() == r1.next());
  // Same index, same child stream, regardless of when it was derived.
  RefStream r0_fresh = ref.child(0);
  CHECK(c0_again.next_u64() == r0_fresh.next());
}

TEST_CASE("substreams are reproducible and distinct") {
  Rng parent(7, 3);
  Rng a = parent.substream(5);
  Rng b = parent.substream(5);
  for (int i = 0; i < 8; ++i) CHECK(a.next_u64() == b.next_u64());

  // Distinct indices give distinct streams; nested derivation is
  // order-sensitive.
  Rng c = parent.substream(6);
  Rng d = parent.substream(5);
  CHECK(c.next_u64() != d.next_u64());
  Rng ij = parent.substream(1).substream(2);
  Rng ji = parent.substream(2).substream(1);
  CHECK(ij.next_u64() != ji.next_u64());
}

TEST_CASE("unit uniforms have the stated range and granularity") {
  Rng rng(99, 0);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    // 53-bit grid: u * 2^53 is an integer.
    double scaled = u * 9007199254740992.0;
    CHECK(scaled == std::floor(scaled));
    sum += u;
  }
  // Mean of n uniforms: sd = 1/sqrt(12 n); allow 5 sigma.
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));

  Rng rng2(99, 0);
  for (int i = 0; i < 1000; ++i) {
    double u = rng2.next_unit_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("gaussian draws match an independent polar Box-Muller oracle") {
  // Reference consumes the same underlying uniforms but uses std::log;
  // agreement within a few ulp confirms the transform, independent of the
  // deterministic log.
  Rng rng(2718, 5);
  RefStream ref(2718, 5);
  auto ref_unit = [&ref] {
    return static_cast<double>(ref.next() >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < 5000; ++i) {
    double g1 = rng.next_gaussian();
    double g2 = rng.next_gaussian();
    double u, v, s;
    do {
      u = 2.0 * ref_unit() - 1.0;
      v = 2.0 * ref_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double factor = std::sqrt(-2.0 * std::log(s) / s);
    CHECK(ulp_distance(g1, u * factor) <= 8);
    CHECK(ulp_distance(g2, v * factor) <= 8);
  }
}

TEST_CASE("gaussian sample follows N(0,1)") {
  Rng rng(31337, 0);
  const int n = 200000;
  std::vector<double> xs(n);
  double m1 = 0.0;
  for (double& x : xs) {
    x = rng.next_gaussian();
    m1 += x;
  }
  m1 /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    double c = x - m1;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(std::abs(m3 / std::pow(m2, 1.5)) < 0.05);
  CHECK(m4 / (m2 * m2) == doctest::Approx(3.0).epsilon(0.05));

  KsResult ks = ks_one_sample(xs, normal_cdf);
  CHECK(ks.p > 0.001);
}

TEST_CASE("wilson interval matches precomputed values") {
  // Reference values computed with 30-digit arithmetic from the score
  // interval formula at z = 2.5758293035489004.
  WilsonInterval w = wilson99(50, 100);
  CHECK(w.p_hat == 0.5);
  CHECK(w.lo == doctest::Approx(0.37527962504483986).epsilon(1e-12));
  CHECK(w.hi == doctest::Approx(0.6247203749551602).epsilon(1e-12));

  w = wilson99(1, 10);
  CHECK(w.lo == doctest::Approx(0.011851503411032943).epsilon(1e-12));
  CHECK(w.hi == doctest::Approx(0.5072317712328935).epsilon(1e-12));

  w = wilson99(900, 1000);
  CHECK(w.lo == doctest::Approx(0.8728654566840358).epsilon(1e-12));
  CHECK(w.hi == doctest::Approx(0.9218616113932387).epsilon(1e-12));

  // Degenerate corners clamp to [0, 1].
  w = wilson99(0, 100);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == doctest::Approx(0.062220687715822974).epsilon(1e-12));
  w = wilson99(100, 100);
  CHECK(w.hi == 1.0);
  CHECK(w.lo == doctest::Approx(0.937779312284177).epsilon(1e-12));

  CHECK_THROWS_AS(wilson99(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(wilson99(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(wilson99(11, 10), std::invalid_argument);
}

TEST_CASE("kolmogorov survival function matches precomputed values") {
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996716773545).epsilon(1e-10));
  CHECK(kolmogorov_q(1.358) ==
        doctest::Approx(0.05002679733444702).epsilon(1e-10));
  CHECK(kolmogorov_q(1.628) ==
        doctest::Approx(0.00997552243118105).epsilon(1e-10));
  CHECK(kolmogorov_q(2.0) ==
        doctest::Approx(0.0006709252557796953).epsilon(1e-10));

  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(-1.0) == 1.0);
  CHECK(kolmogorov_q(1e-8) == 1.0);
  // Monotone decreasing.
  double prev = 1.0;
  for (double x = 0.2; x < 3.0; x += 0.1) {
    double q = kolmogorov_q(x);
    CHECK(q <= prev);
    prev = q;
  }
}

TEST_CASE("one-sample KS distance on a hand-worked example") {
  // Sample {0.1, 0.2, 0.9} against F(x) = x: the largest gap is below the
  // second point, F(0.2) = 0.2 vs ecdf 2/3, so D = 7/15.
  std::vector<double> xs = {0.9, 0.1, 0.2};  // unsorted on purpose
  KsResult ks = ks_one_sample(xs, [](double x) { return x; });
  CHECK(ks.d == doctest::Approx(7.0 / 15.0).epsilon(1e-15));
  double n = 3.0;
  double corrected = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * ks.d;
  CHECK(ks.p == doctest::Approx(kolmogorov_q(corrected)).epsilon(1e-15));
  CHECK_THROWS_AS(ks_one_sample({}, [](double) { return 0.5; }),
                  std::invalid_argument);
}

TEST_CASE("one-sample KS is calibrated on true uniforms") {
  Rng rng(555, 0);
  std::vector<double> xs(5000);
  for (double& x : xs) x = rng.next_unit();
  KsResult ks = ks_one_sample(xs, [](double x) {
    return std::clamp(x, 0.0, 1.0);
  });
  CHECK(ks.p > 0.001);
  CHECK(ks.d < 0.05);
}

TEST_CASE("two-sample KS distance on hand-worked examples") {
  // Interleaved samples: ecdfs alternate by exactly one step of 1/3.
  KsResult ks = ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5, 3.5});
  CHECK(ks.d == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // Ties across samples: at value 1, Fa = 2/3 vs Fb = 1/3.
  ks = ks_two_sample({1.0, 1.0, 2.0}, {1.0, 2.0, 2.0});
  CHECK(ks.d == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // Identical samples have zero distance and p = 1.
  ks = ks_two_sample({1.0, 2.0}, {1.0, 2.0});
  CHECK(ks.d == 0.0);
  CHECK(ks.p == 1.0);

  // Disjoint samples have distance 1.
  ks = ks_two_sample({1.0, 2.0}, {5.0, 6.0});
  CHECK(ks.d == 1.0);

  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
}

TEST_CASE("two-sample KS is calibrated on same-law samples") {
  Rng rng(777, 0);
  std::vector<double> a(4000), b(4000);
  for (double& x : a) x = rng.next_gaussian();
  for (double& x : b) x = rng.next_gaussian();
  KsResult ks = ks_two_sample(a, b);
  CHECK(ks.p > 0.001);
}

TEST_CASE("interval pass rules") {
  WilsonInterval ci{0.2, 0.5, 0.3};
  // An upper bound fails only when the data excludes it from below.
  CHECK(bound_pass(0.25, ci));
  CHECK(bound_pass(0.9, ci));
  CHECK(bound_pass(0.2, ci));
  CHECK_FALSE(bound_pass(0.19, ci));
  // An exact law must sit inside the interval (endpoints included).
  CHECK(exact_pass(0.3, ci));
  CHECK(exact_pass(0.2, ci));
  CHECK(exact_pass(0.5, ci));
  CHECK_FALSE(exact_pass(0.6, ci));
  CHECK_FALSE(exact_pass(0.19, ci));
}
