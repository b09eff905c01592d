#pragma once

#include <cstdint>

namespace spectral {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Counter-based splittable generator. A (seed, stream) pair is hashed into a
// key; the sequence is the SplitMix64 walk from that key. substream(i)
// derives an independent child generator from the parent's key and i, so
// trials can be keyed by index and produce identical draws regardless of
// execution order or thread count.
//
// Gaussians use the polar (rejection) form of the Box-Muller transform: only
// sqrt, which IEEE 754 rounds exactly, and det_log, which is bit-stable by
// construction, touch the stream, so samples are bit-identical across
// platforms and libm implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  explicit Rng(const RngSpec& spec) : Rng(spec.seed, spec.stream) {}

  // Independent child generator keyed by (parent key, index).
  Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1), 53-bit resolution.
  double next_unit();
  // Uniform on (0, 1]; never zero, safe to pass through log.
  double next_unit_pos();
  // Standard normal N(0, 1).
  double next_gaussian();

 private:
  Rng() = default;
  std::uint64_t key_ = 0;
  std::uint64_t state_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace spectral
