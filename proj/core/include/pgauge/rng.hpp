#pragma once

#include "pgauge/numerics.hpp"

#include <cstdint>
#include <random>

namespace pgauge {

/// One step of the SplitMix64 generator; advances `state`.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the independent stream `index` derived from `seed`:
/// two SplitMix64 outputs from state seed ^ (index * golden ratio constant).
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Deterministic random source: MT19937-64 for raw bits, uniforms from the top
/// 53 bits, Gaussians by the Box-Muller transform (both variates used).
/// Output depends only on the seed, never on the platform's <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double gaussian();

  [[nodiscard]] Vector gaussian_vector(Index n, double sd = 1.0);
  [[nodiscard]] Matrix gaussian_matrix(Index rows, Index cols, double sd = 1.0);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pgauge
