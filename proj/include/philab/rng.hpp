#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace philab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with platform-independent sampling helpers. All randomized
/// suites draw from one seeded generator per run; substreams are keyed by
/// check id so adding a check never perturbs the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Box-Muller; avoids the implementation-defined std::normal_distribution.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Independent substream for a named check.
  Rng substream(std::string_view id) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    std::uint64_t mix = seed_hash_ ^ h;
    Rng r(splitmix64(mix));
    r.seed_hash_ = mix;
    return r;
  }

  /// Indexed substream (per-chunk streams of the parallel suites).
  Rng fork(std::uint64_t k) const {
    std::uint64_t mix = seed_hash_ ^ (0x9e3779b97f4a7c15ULL * (k + 0x51ed2701));
    Rng r(splitmix64(mix));
    r.seed_hash_ = mix;
    return r;
  }

  static Rng master(std::uint64_t seed) {
    Rng r(seed);
    r.seed_hash_ = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    return r;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4] = {};
  std::uint64_t seed_hash_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace philab
