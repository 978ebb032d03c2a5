#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace pemi {

/// SplitMix64 (Steele, Lea & Flood 2014). Small state, so a fresh generator
/// can be keyed per permutation / replication / time step without cost; the
/// output sequence is fully specified, hence identical on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream key from a root seed and a path of integer
/// keys, e.g. derive_seed(seed, {replication, t}).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = SplitMix64::mix(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t k : keys) h = SplitMix64::mix(h ^ SplitMix64::mix(k + 0x9e3779b97f4a7c15ULL));
  return h;
}

/// Uniform integer in [0, range) by Lemire's multiply-shift with rejection.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t range) {
  if (range <= 1) return 0;
  std::uint64_t x = gen();
  __uint128_t m = static_cast<__uint128_t>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      x = gen();
      m = static_cast<__uint128_t>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace pemi
