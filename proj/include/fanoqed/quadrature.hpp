#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include "fanoqed/errors.hpp"

namespace fanoqed {

struct QuadratureOptions {
  double rtol = 1e-10;
  double atol = 0.0;
  std::size_t max_intervals = 200000;
  // Each input panel is first cut into this many equal pieces.
  std::size_t initial_subdivisions = 1;
};

template <class T>
struct QuadratureResult {
  T value;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

template <class T>
double magnitude(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(static_cast<double>(v));
  } else if constexpr (requires { v.real(); v.imag(); std::abs(v); }) {
    return static_cast<double>(std::abs(v));
  } else {
    return static_cast<double>(v.cwiseAbs().maxCoeff());
  }
}

// Gauss-Kronrod 7/15 abscissae on [-1, 1] (non-negative half) and weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kronrod += (f1 + f2) * kKronrodWeights[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kGaussWeights[j / 2];
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, magnitude(T(kronrod - gauss))};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature over the consecutive
/// panels [breaks[0], breaks[1]], ..., always bisecting the panel with the
/// largest error estimate. T may be a scalar, std::complex or an Eigen type.
template <class F>
auto integrate_panels(F&& f, std::span<const double> breaks, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (breaks.size() < 2) throw parameter_error("integration needs at least two break points");

  std::priority_queue<detail::Panel<T>> queue;
  QuadratureResult<T> res{};
  const std::size_t sub = std::max<std::size_t>(1, opt.initial_subdivisions);
  bool first = true;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    for (std::size_t j = 0; j < sub; ++j) {
      const double lo = a + (b - a) * static_cast<double>(j) / static_cast<double>(sub);
      const double hi = j + 1 == sub ? b : a + (b - a) * static_cast<double>(j + 1) / static_cast<double>(sub);
      auto panel = detail::kronrod_panel<T>(f, lo, hi);
      if (first) {
        total = panel.value;
        first = false;
      } else {
        total += panel.value;
      }
      err += panel.error;
      queue.push(std::move(panel));
      res.evaluations += 15;
    }
  }

  auto done = [&] { return err <= std::max(opt.atol, opt.rtol * detail::magnitude(total)); };
  while (!done() && queue.size() < opt.max_intervals) {
    auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(std::move(worst));
      break;
    }
    auto left = detail::kronrod_panel<T>(f, worst.a, mid);
    auto right = detail::kronrod_panel<T>(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }

  // Re-sum from scratch so the running updates do not leave rounding residue.
  first = true;
  err = 0.0;
  res.intervals = queue.size();
  while (!queue.empty()) {
    const auto& pnl = queue.top();
    if (first) {
      total = pnl.value;
      first = false;
    } else {
      total += pnl.value;
    }
    err += pnl.error;
    queue.pop();
  }
  res.value = total;
  res.error = err;
  res.converged = done();
  return res;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  const std::array<double, 2> breaks{a, b};
  return integrate_panels(std::forward<F>(f), std::span<const double>(breaks), opt);
}

/// Integral over the whole real line through x = center + width tan(u).
template <class F>
auto integrate_real_line(F&& f, double center, double width, const QuadratureOptions& opt = {}) {
  auto g = [&](double u) {
    const double c = std::cos(u);
    return f(center + width * std::tan(u)) * (width / (c * c));
  };
  const double h = 0.5 * std::numbers::pi;
  const std::array<double, 3> breaks{-h, 0.0, h};
  return integrate_panels(g, std::span<const double>(breaks), opt);
}

/// Throws quadrature_error unless `r` converged.
template <class T>
const QuadratureResult<T>& require_converged(const QuadratureResult<T>& r, const char* what) {
  if (!r.converged) throw quadrature_error(what, r.error);
  return r;
}

}  // namespace fanoqed
