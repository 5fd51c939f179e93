#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "lne/numkit.hpp"

namespace lne::verify {

/// Seeded generator for property draws. Only the raw mt19937_64 stream is
/// used (std distributions vary between standard libraries), so a seed
/// reproduces the same draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) from 53 bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi);
  /// Uniform integer in [lo, hi].
  std::size_t integer(std::size_t lo, std::size_t hi);
  /// Standard exponential.
  double exponential();

  /// n positive weights with exponential shape plus `floor`, normalized.
  WeightVector probability(std::size_t n, double floor = 1e-3);
  /// Like probability() but each entry is zero with chance `zero_chance`
  /// (at least one entry stays positive), scaled to mass `mass`.
  WeightVector weights(std::size_t n, double zero_chance, double mass);

 private:
  std::mt19937_64 eng_;
};

}  // namespace lne::verify
