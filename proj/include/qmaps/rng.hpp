#ifndef QMAPS_RNG_HPP
#define QMAPS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace qmaps {

//=========================================================================
// Deterministic random streams
//=========================================================================
//
// All randomized procedures derive independent substreams from
// (master seed, index) so that trials and optimizer restarts are
// reproducible regardless of evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_stream(seed, index));
  }

  /// Uniform in [0, 1)
  double uniform() {
    return std::generate_canonical<double, 53>(engine_);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t integer(std::uint64_t n) { // in [0, n)
    return engine_() % n;
  }

  /// Standard normal via Box-Muller (self-contained, stable across
  /// standard library implementations).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300)
      u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  double exponential() {
    double u = uniform();
    while (u >= 1.0)
      u = uniform();
    return -std::log1p(-u);
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace qmaps

#endif // QMAPS_RNG_HPP
