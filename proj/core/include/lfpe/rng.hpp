#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace lfpe {

// Splittable deterministic random stream (xoshiro256++ with splitmix64 seeding).
//
// Every stream is identified by a 64-bit key mixed from (seed, stream id).
// Streams with equal keys produce identical draw sequences on every platform;
// streams with different keys are statistically independent.  derive() spawns
// a child keyed by the parent's *identity* and a salt — not by the parent's
// current state — so the derivation tree does not depend on how many draws the
// parent has made or on which thread it runs.  That is what makes per-trial,
// per-datum and per-particle substreams reproducible under any scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : RngStream(FromKey{}, stream_key(seed, stream)) {}

  // Child stream keyed by (this stream's identity, salt).
  RngStream derive(std::uint64_t salt) const {
    return RngStream(FromKey{}, child_key(key_, salt));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; draws come in cached pairs.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_normal_;
    }
    double u1 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard; smallest representable draw
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586 * u2;
    spare_normal_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  struct FromKey {};

  RngStream(FromKey, std::uint64_t key) : key_(key) {
    std::uint64_t sm = key_;
    for (auto& word : state_) word = splitmix64(sm);
    // xoshiro must not start from the all-zero state.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += kGolden;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed ^ kGolden) + kGolden * mix(stream + 1));
  }

  static std::uint64_t child_key(std::uint64_t parent, std::uint64_t salt) {
    return mix(parent + kGolden * mix(salt + 1));
  }

  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
  double spare_normal_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lfpe
