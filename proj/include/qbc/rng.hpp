#ifndef QBC_RNG_HPP
#define QBC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace qbc {

/// Seedable, splittable random stream.
///
/// The core engine is std::mt19937_64, whose raw 64-bit output sequence is
/// fully specified by the standard. Doubles and bounded integers are derived
/// from raw draws only (never via std::*_distribution), so a given seed
/// reproduces the same values on any platform and build.
///
/// derive(key) produces an independent child stream by mixing the stored
/// seed with the key through splitmix64; parallel Monte Carlo uses one
/// derived stream per trial so scheduling never changes results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), eng_(mix(seed, 0x6a09e667f3bcc908ull)) {}

  /// Independent substream; derive(i) != derive(j) mixes for i != j.
  RngStream derive(std::uint64_t key) const { return RngStream(mix(seed_, key)); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t u64() { return eng_(); }

  /// Uniform in [0, 1), 53 bits of mantissa.
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  int bit() { return static_cast<int>(u64() >> 63); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; second value cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t key) {
    // splitmix64 finalizer over seed advanced by key.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (key + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qbc

#endif
