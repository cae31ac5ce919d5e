// Deterministic random streams.
//
// Monte-Carlo runs must reproduce bit-for-bit across thread counts and
// builds, so every trial gets its own counter-derived stream instead of
// sharing one generator. The generator is splitmix64; normal variates use
// the Box-Muller transform (fixed choice, no libstdc++ dependence).

#pragma once

#include <cstdint>

#include <cmath>

namespace gtwc {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {
    // two warm-up rounds decorrelate nearby seeds
    splitmix64_next(state_);
    splitmix64_next(state_);
  }

  // Independent substream for (seed, index); used for per-trial and
  // per-restart derivation.
  static RandomStream derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t t = index ^ 0x632BE59BD9B4E019ULL;
    std::uint64_t b = splitmix64_next(t);
    return RandomStream(a ^ (b + 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform on [0,1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] so the log is finite
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  // equiprobable +1 / -1
  double binary_pm1() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace gtwc
