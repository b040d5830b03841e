#pragma once

#include <array>
#include <cstdint>

namespace affinehjm {

/// Philox4x32 with 10 rounds.  Counter-based: the k-th block of a stream is a
/// pure function of (key, counter), so per-path streams derived from
/// (seed, path index) produce bit-identical draws on every platform and under
/// any thread count.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key);
};

/// One reproducible stream of variates.  The stream id selects the upper half
/// of the Philox counter, the seed is the key; draws consume 64 counter
/// values per block of two uniforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (second variate cached).
  double normal();
  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate);
  /// Poisson count by inversion of the product of uniforms; intended for the
  /// small per-step means that arise from jump thinning.
  int poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  Philox4x32::Block block_{};
  int block_pos_ = 2;  // uniforms remaining in block_: 2 - block_pos_
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace affinehjm
