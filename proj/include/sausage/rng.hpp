#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sausage {

// splitmix64 finalizer: bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One block of Philox4x32 with 10 rounds.  Counter and key layouts follow the
// common little-endian word order: ctr = {v0,v1,v2,v3}, key = {k0,k1}.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::array<std::uint32_t, 4> out = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0)};
    ctr = out;
  }
  return ctr;
}

// Counter-based stream.  The same (master_seed, stream_id) pair reproduces the
// same sequence on every platform and worker count; distinct ids give
// statistically independent streams (keys separated by the mix64 avalanche).
// Streams are value types: copying forks the current state.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(mix64(master_seed ^ mix64(stream_id))) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream for a named purpose (estimator block, experiment arm, ...).
  // Depends only on the parent's identity, not on how much the parent has
  // consumed, so call sites may derive substreams at any point.
  RandomStream substream(std::uint64_t purpose) const {
    RandomStream child;
    child.master_seed_ = key_;
    child.stream_id_ = purpose;
    child.key_ = mix64(key_ ^ mix64(purpose));
    return child;
  }

  std::uint64_t next_u64() {
    if (word_pos_ >= 4) refill();
    const std::uint64_t lo = block_[word_pos_];
    const std::uint64_t hi = block_[word_pos_ + 1];
    word_pos_ += 2;
    return lo | (hi << 32);
  }

  // 53-bit uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1): never returns an endpoint, safe under log().
  double open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential() { return -std::log(open01()); }

  // Standard normal via Box-Muller; the second deviate of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(open01()));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * uniform01();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  void refill() {
    block_ = philox4x32(
        {static_cast<std::uint32_t>(ctr_lo_),
         static_cast<std::uint32_t>(ctr_lo_ >> 32),
         static_cast<std::uint32_t>(ctr_hi_),
         static_cast<std::uint32_t>(ctr_hi_ >> 32)},
        {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
    if (++ctr_lo_ == 0) ++ctr_hi_;
    word_pos_ = 0;
  }

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t ctr_lo_ = 0;
  std::uint64_t ctr_hi_ = 0;
  std::array<std::uint32_t, 4> block_ = {0, 0, 0, 0};
  int word_pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sausage
