#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "fanoqed/errors.hpp"

namespace fanoqed {

struct AdaptiveOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 picks one from the initial derivative
  std::size_t max_steps = 50'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

template <class Vec>
double scaled_error(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

}  // namespace detail

/// Dormand-Prince 5(4) with FSAL and per-component max-norm error control.
///
/// `rhs(t, y)` returns dy/dt. The step is clipped to land on every output
/// time; `observe(k, t_k, y)` is called for each of them, k = 0 included.
/// Throws integration_error when the step collapses below the resolution of t
/// or the step budget runs out.
template <class Vec, class Rhs, class Observer>
StepStats integrate_adaptive(Rhs&& rhs, Vec y, std::span<const double> times, Observer&& observe,
                             const AdaptiveOptions& opt = {}) {
  // Butcher tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  StepStats stats;
  if (times.empty()) return stats;
  double t = times[0];
  observe(std::size_t{0}, t, y);
  if (times.size() == 1) return stats;

  Vec k1 = rhs(t, y);
  double h = opt.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, times.back() - times.front());
  }

  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (t < target) {
      if (stats.accepted + stats.rejected >= opt.max_steps)
        throw integration_error("step budget exhausted", t);
      const double remaining = target - t;
      const bool last = h >= remaining;
      const double step = last ? remaining : h;
      if (step <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw integration_error("step size underflow", t);

      const Vec k2 = rhs(t + c2 * step, (y + step * (a21 * k1)).eval());
      const Vec k3 = rhs(t + c3 * step, (y + step * (a31 * k1 + a32 * k2)).eval());
      const Vec k4 = rhs(t + c4 * step, (y + step * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
      const Vec k5 =
          rhs(t + c5 * step, (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
      const Vec k6 = rhs(t + step,
                         (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
      const Vec y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = rhs(t + step, y_new);
      const Vec err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const double en = detail::scaled_error(err, y, y_new, opt.rtol, opt.atol);
      if (!std::isfinite(en)) {
        ++stats.rejected;
        h = step * min_factor;
        continue;
      }
      if (en <= 1.0) {
        ++stats.accepted;
        t = last ? target : t + step;
        y = y_new;
        k1 = k7;
        const double grow = en == 0.0 ? max_factor
                                      : std::clamp(safety * std::pow(en, -0.2), min_factor,
                                                   max_factor);
        // A step shortened to hit an output time says nothing about the
        // natural step size, so do not let it shrink h.
        h = last ? std::max(h, step * grow) : step * grow;
      } else {
        ++stats.rejected;
        h = step * std::max(min_factor, safety * std::pow(en, -0.2));
      }
    }
    observe(k, t, y);
  }
  return stats;
}

/// Classical fourth-order Runge-Kutta with a fixed nominal step. Each output
/// interval is split into ceil(dt / h) equal substeps, so results depend only
/// on the output grid and h.
template <class Vec, class Rhs, class Observer>
StepStats integrate_fixed(Rhs&& rhs, Vec y, std::span<const double> times, Observer&& observe,
                          double h) {
  if (!(h > 0.0)) throw parameter_error("fixed step must be positive");
  StepStats stats;
  if (times.empty()) return stats;
  observe(std::size_t{0}, times[0], y);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t0 = times[k - 1];
    const double span = times[k] - t0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h - 1e-9)));
    const double dt = span / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = t0 + dt * static_cast<double>(j);
      const Vec s1 = rhs(t, y);
      const Vec s2 = rhs(t + dt / 2, (y + (dt / 2) * s1).eval());
      const Vec s3 = rhs(t + dt / 2, (y + (dt / 2) * s2).eval());
      const Vec s4 = rhs(t + dt, (y + dt * s3).eval());
      y += (dt / 6) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
      ++stats.accepted;
    }
    observe(k, times[k], y);
  }
  return stats;
}

}  // namespace fanoqed
