#include "affinehjm/rng.hpp"

#include <cmath>

#include "affinehjm/errors.hpp"

namespace affinehjm {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Block round_once(const Philox4x32::Block& c, const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    counter = round_once(counter, key);
    if (r < 9) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
  }
  return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void RngStream::refill() {
  const Philox4x32::Block counter = {
      static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  block_ = Philox4x32::generate(counter, key);
  ++counter_;
  block_pos_ = 0;
}

double RngStream::uniform() {
  if (block_pos_ >= 2) refill();
  const std::uint64_t bits = (static_cast<std::uint64_t>(block_[2 * block_pos_]) << 32) |
                             block_[2 * block_pos_ + 1];
  ++block_pos_;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // 1 - u lies in (0, 1], keeping the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(angle);
  has_cached_normal_ = true;
  return r * std::cos(angle);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("RngStream::exponential: rate must be positive");
  return -std::log(1.0 - uniform()) / rate;
}

int RngStream::poisson(double mean) {
  if (mean < 0.0) throw DomainError("RngStream::poisson: mean must be non-negative");
  if (mean == 0.0) return 0;
  if (mean > 500.0) {
    throw NumericalError("RngStream::poisson: mean too large for the product method");
  }
  const double limit = std::exp(-mean);
  int count = 0;
  double product = uniform();
  while (product > limit) {
    ++count;
    product *= uniform();
  }
  return count;
}

}  // namespace affinehjm
