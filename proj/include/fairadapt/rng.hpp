#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fairadapt {

// Deterministic random source. mt19937_64 output is fully specified by the
// standard, but the std:: distributions are not, so the distributions here
// are hand-rolled to keep generated corpora and initializations bit-identical
// across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; caches the second deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes a base seed with stream tags so that independent consumers (init,
// per-epoch shuffles, pair sampling, ...) get decorrelated deterministic
// streams. splitmix64 finalizer applied over the chained words.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::uint64_t tag,
                                 std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s = mix(base);
  s = mix(s ^ tag);
  s = mix(s ^ a);
  s = mix(s ^ b);
  return s;
}

namespace seed_tag {
// Stream tags for derive_seed. Arbitrary distinct constants.
inline constexpr std::uint64_t kInit = 0x696e6974ULL;        // model init
inline constexpr std::uint64_t kSynthSource = 0x73796e3073ULL;
inline constexpr std::uint64_t kSynthTarget = 0x73796e3074ULL;
inline constexpr std::uint64_t kSynthDomain = 0x73796e3064ULL;
inline constexpr std::uint64_t kSplit = 0x73706c6974ULL;
inline constexpr std::uint64_t kStage1 = 0x73746731ULL;
inline constexpr std::uint64_t kStage2 = 0x73746732ULL;
inline constexpr std::uint64_t kPairs = 0x7061697273ULL;
inline constexpr std::uint64_t kProbe = 0x70726f6265ULL;
inline constexpr std::uint64_t kPermTest = 0x7065726dULL;
}  // namespace seed_tag

}  // namespace fairadapt
