#include "spectral/detmath.hpp"

#include <bit>
#include <cstdint>
#include <limits>

namespace spectral {

namespace {

// Argument reduction and minimax coefficients of the classical fdlibm
// natural-log kernel (freely redistributable, Sun Microsystems). Evaluation
// uses only +,-,*,/ so results are identical on every IEEE 754 platform.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kTwo54 = 1.80143985094819840000e+16;
constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;

std::int32_t high_word(double x) {
  return static_cast<std::int32_t>(std::bit_cast<std::uint64_t>(x) >> 32);
}

std::uint32_t low_word(double x) {
  return static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(x));
}

double with_high_word(double x, std::int32_t hi) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  bits = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(hi)) << 32) |
         (bits & 0xffffffffull);
  return std::bit_cast<double>(bits);
}

}  // namespace

double det_log(double x) {
  std::int32_t hx = high_word(x);
  std::uint32_t lx = low_word(x);

  std::int32_t k = 0;
  if (hx < 0x00100000) {  // subnormal, zero, or negative
    if (((hx & 0x7fffffff) | static_cast<std::int32_t>(lx != 0)) == 0)
      return -std::numeric_limits<double>::infinity();
    if (hx < 0) return std::numeric_limits<double>::quiet_NaN();
    k -= 54;
    x *= kTwo54;
    hx = high_word(x);
  }
  if (hx >= 0x7ff00000) return x + x;  // inf or NaN
  k += (hx >> 20) - 1023;
  hx &= 0x000fffff;
  std::int32_t i = (hx + 0x95f64) & 0x100000;
  x = with_high_word(x, hx | (i ^ 0x3ff00000));  // normalize to [sqrt(2)/2, sqrt(2))
  k += i >> 20;
  double f = x - 1.0;

  if ((0x000fffff & (2 + hx)) < 3) {  // |f| < 2^-20
    if (f == 0.0) {
      if (k == 0) return 0.0;
      double dk = static_cast<double>(k);
      return dk * kLn2Hi + dk * kLn2Lo;
    }
    double r = f * f * (0.5 - 0.33333333333333333 * f);
    if (k == 0) return f - r;
    double dk = static_cast<double>(k);
    return dk * kLn2Hi - ((r - dk * kLn2Lo) - f);
  }

  double s = f / (2.0 + f);
  double dk = static_cast<double>(k);
  double z = s * s;
  i = hx - 0x6147a;
  double w = z * z;
  std::int32_t j = 0x6b851 - hx;
  double t1 = w * (kLg2 + w * (kLg4 + w * kLg6));
  double t2 = z * (kLg1 + w * (kLg3 + w * (kLg5 + w * kLg7)));
  i |= j;
  double r = t2 + t1;
  if (i > 0) {
    double hfsq = 0.5 * f * f;
    if (k == 0) return f - (hfsq - s * (hfsq + r));
    return dk * kLn2Hi - ((hfsq - (s * (hfsq + r) + dk * kLn2Lo)) - f);
  }
  if (k == 0) return f - s * (f - r);
  return dk * kLn2Hi - ((s * (f - r) - dk * kLn2Lo) - f);
}

}  // namespace spectral
