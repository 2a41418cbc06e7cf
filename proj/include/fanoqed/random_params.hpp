#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fanoqed/params.hpp"

namespace fanoqed {

/// Draws physically valid parameter sets over a broad range: |g| in [0, 200],
/// gamma log-uniform in [1e-2, 5], kappa log-uniform in [1, 316], gamma_ph in
/// [0, 50], eta in [0, 1], omega_c - omega21 in [-5000, 5000] ueV and
/// uniformly random phases.
class RandomParams {
 public:
  explicit RandomParams(std::uint64_t seed) : rng_(seed) {}

  SystemParams operator()() {
    SystemParams p;
    p.omega21 = 0.0;
    p.g_abs = uniform(0.0, 200.0);
    p.gamma = std::pow(10.0, uniform(-2.0, 0.7));
    p.kappa = std::pow(10.0, uniform(0.0, 2.5));
    p.gamma_ph = uniform(0.0, 50.0);
    p.eta = uniform(0.0, 1.0);
    p.omega_c = uniform(-5000.0, 5000.0);
    p.phi = uniform(0.0, 2.0 * std::numbers::pi);
    p.theta21 = uniform(0.0, 2.0 * std::numbers::pi);
    p.theta_c = uniform(0.0, 2.0 * std::numbers::pi);
    return p;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fanoqed
