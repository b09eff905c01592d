#include "spectral/rng.hpp"

#include <cmath>

#include "spectral/detmath.hpp"

namespace spectral {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
// Domain separators so that (seed, stream) hashing and substream derivation
// can never alias each other.
constexpr std::uint64_t kStreamSalt = 0xA5A5A5A5A5A5A5A5ull;
constexpr std::uint64_t kChildSalt = 0xC3C3C3C3C3C3C3C3ull;

// SplitMix64 finalizer: bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  key_ = mix64(seed ^ mix64(stream ^ kStreamSalt));
  state_ = key_;
}

Rng Rng::substream(std::uint64_t index) const {
  Rng child;
  child.key_ = mix64(key_ ^ mix64(index ^ kChildSalt));
  child.state_ = child.key_;
  return child;
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_unit_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // Polar Box-Muller: accept (u, v) uniform in the unit disk, then
  // (u, v) * sqrt(-2 log s / s) with s = u^2 + v^2 is a standard normal
  // pair. sqrt is exactly rounded and det_log is bit-stable, so the draw
  // sequence is platform-independent.
  for (;;) {
    double u = 2.0 * next_unit() - 1.0;
    double v = 2.0 * next_unit() - 1.0;
    double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    double factor = std::sqrt(-2.0 * det_log(s) / s);
    cached_gaussian_ = v * factor;
    has_cached_gaussian_ = true;
    return u * factor;
  }
}

}  // namespace spectral
