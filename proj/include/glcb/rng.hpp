#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace glcb {

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic random stream. All variates are derived from the raw
/// mt19937_64 output with fixed algorithms, so sequences do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent named substream of a master seed. Adding a new consumer
  /// under a different name never perturbs existing streams.
  static Rng stream(std::uint64_t master_seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (no state carried between calls).
  double normal();
  double normal(double mean, double stddev);

  /// Uniform in {0, ..., n-1}, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace glcb
