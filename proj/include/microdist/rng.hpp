#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace microdist {

/// splitmix64 finalizer; used to derive independent seed streams from a
/// master seed so results do not depend on execution order or thread count.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream + 0x632be59bd9b4e019ull));
}

/// Deterministic random source. The engine is mt19937_64 (fully specified by
/// the standard) and all distributions are implemented here, so a given seed
/// produces identical sequences on every platform and compiler.
///
/// Note for deployments: experiment reproducibility is the point of this
/// class. A production pad must come from a cryptographically secure
/// generator instead (see pad.hpp).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, count).
  std::size_t index(std::size_t count) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(count));
  }

  bool coin() { return (engine_() & 1ull) != 0; }

  /// Standard normal via Box-Muller (no caching, so draw order is obvious).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Standard exponential (rate 1).
  double exponential() {
    double e = -std::log1p(-uniform01());
    return e > 1e-300 ? e : 1e-300;
  }

  /// Student-t with 2 degrees of freedom: z / sqrt(Exp(1)).
  /// Heavy-tailed (infinite variance), median |t| = 0.8165.
  double student_t2() { return normal() / std::sqrt(exponential()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace microdist
