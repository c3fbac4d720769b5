#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "surplus/scenario.hpp"

namespace surplus {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Position uniform_position(Rng& rng, std::size_t n, double radius) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, -radius, radius);
  return Position(std::move(v));
}

/// Deterministic axis probes −2R·e_j, then uniform draws on [−R, R]^N.
class PositionSampler {
 public:
  PositionSampler(std::size_t n, double radius, std::uint64_t seed) : n_(n), radius_(radius), rng_(seed) {}

  Position next() {
    if (probe_ < n_) return Position::unit(n_, probe_++, -2.0 * radius_);
    return uniform_position(rng_, n_, radius_);
  }
  Rng& rng() noexcept { return rng_; }
  [[nodiscard]] double radius() const noexcept { return radius_; }

 private:
  std::size_t n_;
  double radius_;
  Rng rng_;
  std::size_t probe_ = 0;
};

}  // namespace surplus
