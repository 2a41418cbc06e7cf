#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fanoqed/params.hpp"

namespace fanoqed::testing {

// |g| = 100, gamma = 0.05, kappa = 50, eta = 1 (the library defaults).
inline SystemParams reference() { return SystemParams{}; }

// Weak coupling with |q| close to 3.
inline SystemParams weak_fano() {
  SystemParams p;
  p.g_abs = 2.37;
  return p;
}

inline SystemParams decoupled() {
  SystemParams p;
  p.g_abs = 0.0;
  p.eta = 0.0;
  return p;
}

// omega21 - omega_c = -3160 ueV
inline constexpr double kFarDetuning = -3160.0;

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double relative_l2(std::span<const double> a, std::span<const double> ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

}  // namespace fanoqed::testing
