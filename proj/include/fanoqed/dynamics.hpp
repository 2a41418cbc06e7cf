#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "fanoqed/errors.hpp"
#include "fanoqed/ode.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/rates.hpp"

namespace fanoqed {

/// Excited-state population, cavity photon number and <sigma_+ a>.
struct BlochTriple {
  double n_e = 1.0;
  double n_c = 0.0;
  std::complex<double> pol{};
};

enum class Integrator {
  adaptive,     // Dormand-Prince 5(4)
  fixed_step,   // RK4 with a fixed nominal step
  exponential,  // exact propagator exp(A dt) of the linear generator
  automatic,    // adaptive unless the horizon needs an absurd number of steps
};

inline const char* to_string(Integrator m) {
  switch (m) {
    case Integrator::adaptive: return "dormand-prince-5(4)";
    case Integrator::fixed_step: return "rk4-fixed";
    case Integrator::exponential: return "matrix-exponential";
    case Integrator::automatic: return "automatic";
  }
  return "?";
}

struct EvolveOptions {
  Integrator method = Integrator::automatic;
  AdaptiveOptions adaptive{};
  // Nominal RK4 step; 0 means 0.02 / ||A||_inf.
  double fixed_step = 0.0;
  // automatic switches to the exponential propagator above this many
  // estimated Runge-Kutta steps.
  double max_estimated_steps = 5e6;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<BlochTriple> states;

  // metadata
  Integrator method = Integrator::adaptive;
  double rtol = 0.0;
  double atol = 0.0;
  double step = 0.0;  // fixed step actually used, 0 for the other methods
  StepStats stats{};
  SystemParams params{};

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline void check_time_grid(std::span<const double> grid) {
  if (grid.empty()) throw parameter_error("time grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw parameter_error("time grid contains a non-finite value");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw parameter_error("time grid must be strictly increasing");
  }
}

template <class S>
struct WidenedScalar {
  using type = long double;
};
template <class S>
struct WidenedScalar<std::complex<S>> {
  using type = std::complex<long double>;
};

/// Rough Dormand-Prince step count for a linear system with generator A at
/// tolerance ~1e-10 over `horizon`.
template <class Mat>
double estimated_rk_steps(const Mat& a, double horizon) {
  return 100.0 * horizon * a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Integrates y' = A y on `grid` with the chosen method and returns the
/// method that actually ran.
template <class Mat, class Vec, class Observer>
Integrator propagate_linear(const Mat& a, const Vec& y0, std::span<const double> grid,
                            const EvolveOptions& opt, Observer&& observe, StepStats& stats,
                            double& used_step) {
  Integrator method = opt.method;
  const double horizon = grid.back() - grid.front();
  if (method == Integrator::automatic) {
    method = estimated_rk_steps(a, horizon) > opt.max_estimated_steps ? Integrator::exponential
                                                                      : Integrator::adaptive;
  }
  used_step = 0.0;
  auto rhs = [&a](double, const Vec& y) -> Vec { return a * y; };
  switch (method) {
    case Integrator::adaptive:
      stats = integrate_adaptive<Vec>(rhs, y0, grid, observe, opt.adaptive);
      break;
    case Integrator::fixed_step: {
      const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
      used_step = opt.fixed_step > 0.0 ? opt.fixed_step : (norm > 0.0 ? 0.02 / norm : horizon);
      stats = integrate_fixed<Vec>(rhs, y0, grid, observe, used_step);
      break;
    }
    case Integrator::exponential:
    default: {
      // Scaling and squaring perturbs A by about eps ||A dt||, which over a
      // horizon t shifts a slow decay rate by eps ||A|| and the populations
      // by that times t. Near the dark point (W ~ 1e-9 kappa) this reaches
      // 1e-5 in double; extended precision cuts it by eps_ld / eps_d.
      using Wide = typename WidenedScalar<typename Mat::Scalar>::type;
      using WideMat = Eigen::Matrix<Wide, Mat::RowsAtCompileTime, Mat::ColsAtCompileTime>;
      using WideVec = Eigen::Matrix<Wide, Vec::RowsAtCompileTime, 1>;
      const WideMat wa = a.template cast<Wide>();
      // Output grids are usually uniform, so cache propagators by interval.
      std::map<double, WideMat> cache;
      WideVec y = y0.template cast<Wide>();
      observe(std::size_t{0}, grid[0], y0);
      for (std::size_t k = 1; k < grid.size(); ++k) {
        const double dt = grid[k] - grid[k - 1];
        auto it = cache.find(dt);
        if (it == cache.end()) {
          const WideMat step = (wa * static_cast<long double>(dt)).exp();
          it = cache.emplace(dt, step).first;
        }
        y = it->second * y;
        ++stats.accepted;
        observe(k, grid[k], Vec(y.template cast<typename Mat::Scalar>()));
      }
      method = Integrator::exponential;
      break;
    }
  }
  return method;
}

}  // namespace detail

/// Real generator of (n_c, n_e, Re p, Im p) under the three-variable
/// equations of motion.
inline Eigen::Matrix4d triple_generator(const SystemParams& p) {
  using C = std::complex<double>;
  const auto dc = derive_couplings<double>(p);
  const C i{0, 1};
  const C den = C(dc.gamma_tot, dc.detuning);
  auto rhs = [&](const Eigen::Vector4d& y) {
    const double nc = y[0], ne = y[1];
    const C pol{y[2], y[3]};
    const double dnc = 2.0 * std::real(i * dc.g_plus * pol) - p.kappa * nc;
    const double dne = 2.0 * std::real(-i * dc.g_minus * pol) - p.gamma * ne;
    const C dp = -i * std::conj(dc.g_plus) * ne + i * std::conj(dc.g_minus) * nc - den * pol;
    return Eigen::Vector4d(dnc, dne, dp.real(), dp.imag());
  };
  Eigen::Matrix4d a;
  for (int j = 0; j < 4; ++j) a.col(j) = rhs(Eigen::Vector4d::Unit(j));
  return a;
}

inline Trajectory evolve_triple(const SystemParams& p, const BlochTriple& init,
                                std::span<const double> grid, const EvolveOptions& opt = {}) {
  validate(p);
  detail::check_time_grid(grid);
  if (!std::isfinite(init.n_e) || !std::isfinite(init.n_c) || !std::isfinite(init.pol.real()) ||
      !std::isfinite(init.pol.imag()))
    throw parameter_error("initial state must be finite");

  Trajectory traj;
  traj.params = p;
  traj.t.reserve(grid.size());
  traj.states.reserve(grid.size());
  const Eigen::Matrix4d a = triple_generator(p);
  const Eigen::Vector4d y0(init.n_c, init.n_e, init.pol.real(), init.pol.imag());
  auto observe = [&](std::size_t, double t, const Eigen::Vector4d& y) {
    traj.t.push_back(t);
    traj.states.push_back(BlochTriple{y[1], y[0], {y[2], y[3]}});
  };
  traj.method = detail::propagate_linear(a, y0, grid, opt, observe, traj.stats, traj.step);
  if (traj.method == Integrator::adaptive) {
    traj.rtol = opt.adaptive.rtol;
    traj.atol = opt.adaptive.atol;
  }
  return traj;
}

/// gamma n_e + kappa n_c + 2 Re(gamma_F p): the photon emission rate, equal
/// to -d/dt (n_e + n_c).
inline double emission_intensity(const SystemParams& p, const BlochTriple& s) {
  const auto dc = derive_couplings<double>(p);
  return p.gamma * s.n_e + p.kappa * s.n_c + 2.0 * std::real(dc.gamma_f * s.pol);
}

template <std::floating_point Real = double>
struct CoarseState {
  Real n_e;
  Real n_c;
};

/// Closed-form coarse-grained populations for n_e(0) = 1, n_c(0) = 0.
template <std::floating_point Real = double>
CoarseState<Real> coarse_grained_solution(const CoarseRateSystem<Real>& rs, Real t) {
  if (t < 0) throw parameter_error("coarse_grained_solution: t must be non-negative");
  const Real lp = rs.lambda_plus, lm = rs.lambda_minus;
  const Real gap = lp - lm;
  const Real scale = std::max({std::abs(lp), std::abs(lm), rs.gamma + rs.kappa});
  // phi(t) = (e^{lp t} - e^{lm t}) / (lp - lm), written so that it stays
  // accurate when the gap is small and when e^{lm t} underflows.
  Real phi;
  if (gap < Real(1e-9) * scale) {
    phi = t * std::exp(Real(0.5) * (lp + lm) * t);
  } else {
    phi = std::exp(lp * t) * (-std::expm1(-gap * t)) / gap;
  }
  const Real c = rs.r_pm + rs.kappa;
  CoarseState<Real> s;
  s.n_e = std::exp(lp * t) + (lm + c) * phi;
  s.n_c = rs.r_pp * phi;
  return s;
}

template <std::floating_point Real = double>
CoarseState<Real> coarse_grained_solution(const SystemParams& p, Real t) {
  return coarse_grained_solution(rate_coefficients<Real>(p), t);
}

/// (-i g_+^* n_e + i g_-^* n_c) / (i omega_{c,21} + Gamma_tot)
template <std::floating_point Real = double>
std::complex<Real> adiabatic_polarization(const DerivedCouplings<Real>& dc, Real n_e, Real n_c) {
  using C = std::complex<Real>;
  const C i{0, 1};
  const C den(dc.gamma_tot, dc.detuning);
  return (-i * std::conj(dc.g_plus) * n_e + i * std::conj(dc.g_minus) * n_c) / den;
}

template <std::floating_point Real = double>
std::complex<Real> adiabatic_polarization(const SystemParams& p, Real n_e, Real n_c) {
  return adiabatic_polarization(derive_couplings<Real>(p), n_e, n_c);
}

/// Coarse-grained populations on a grid, packed into a Trajectory with the
/// adiabatic polarization.
inline Trajectory coarse_trajectory(const SystemParams& p, std::span<const double> grid) {
  detail::check_time_grid(grid);
  const auto dc = derive_couplings<double>(p);
  const auto rs = rate_coefficients(dc, p);
  Trajectory traj;
  traj.params = p;
  for (double t : grid) {
    const auto s = coarse_grained_solution(rs, t);
    traj.t.push_back(t);
    traj.states.push_back(BlochTriple{s.n_e, s.n_c, adiabatic_polarization(dc, s.n_e, s.n_c)});
  }
  return traj;
}

namespace detail {

struct Extremum {
  double t;
  double value;
};

// Interior local extrema of `y`, refined by the parabola through the three
// samples around each one.
inline std::vector<Extremum> local_extrema(std::span<const double> t, std::span<const double> y,
                                           bool maxima) {
  std::vector<Extremum> out;
  const double sign = maxima ? 1.0 : -1.0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double a = sign * y[i - 1], b = sign * y[i], c = sign * y[i + 1];
    if (!(b > a && b >= c)) continue;
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    // Fit y = b + d1 (s) + d2 s^2 with s = t - t[i].
    const double d2 = ((c - b) / h1 - (b - a) / h0) / (h0 + h1);
    const double d1 = (c - b) / h1 - d2 * h1;
    double s = 0.0, v = b;
    if (d2 < 0.0) {
      s = std::clamp(-d1 / (2.0 * d2), -h0, h1);
      v = b + d1 * s + d2 * s * s;
    }
    out.push_back({t[i] + s, sign * v});
  }
  return out;
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline std::vector<double> excited_population(const Trajectory& traj) {
  std::vector<double> y(traj.states.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = traj.states[i].n_e;
  return y;
}

}  // namespace detail

/// Decay rate of n_e. Oscillating trajectories (>= 5 interior maxima) are
/// fitted through the logarithm of their maxima; monotonically decaying ones
/// through log n_e itself.
inline double envelope_decay_rate(const Trajectory& traj) {
  if (traj.size() < 3)
    throw envelope_error(envelope_error::kind::too_few_extrema, "trajectory has fewer than 3 samples");
  const auto ne = detail::excited_population(traj);

  std::vector<double> x, ly;
  const bool monotone = std::adjacent_find(ne.begin(), ne.end(), std::less<>()) == ne.end();
  if (monotone) {
    for (std::size_t i = 0; i < ne.size(); ++i) {
      if (ne[i] > 0.0 && std::isfinite(ne[i])) {
        x.push_back(traj.t[i]);
        ly.push_back(std::log(ne[i]));
      }
    }
    if (x.size() < 2)
      throw envelope_error(envelope_error::kind::fit_failure, "fewer than two positive samples");
  } else {
    const auto peaks = detail::local_extrema(traj.t, ne, true);
    if (peaks.size() < 5)
      throw envelope_error(envelope_error::kind::too_few_extrema,
                           "found " + std::to_string(peaks.size()) + " maxima, need 5");
    for (const auto& e : peaks) {
      if (!(e.value > 0.0))
        throw envelope_error(envelope_error::kind::fit_failure, "non-positive maximum");
      x.push_back(e.t);
      ly.push_back(std::log(e.value));
    }
  }
  const double rate = -detail::fit_slope(x, ly);
  if (!std::isfinite(rate) || !(rate > 0.0))
    throw envelope_error(envelope_error::kind::fit_failure, "fitted envelope does not decay");
  return rate;
}

/// Midline of an oscillating n_e: the mean of the upper and lower envelopes,
/// each linearly interpolated between refined extrema. Only sample times
/// bracketed by both envelopes are returned.
struct Midline {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<std::size_t> index;  // position of each point in the trajectory
};

inline Midline oscillation_midline(const Trajectory& traj) {
  const auto ne = detail::excited_population(traj);
  const auto up = detail::local_extrema(traj.t, ne, true);
  const auto lo = detail::local_extrema(traj.t, ne, false);
  if (up.size() < 2 || lo.size() < 2)
    throw envelope_error(envelope_error::kind::too_few_extrema, "need two maxima and two minima");
  auto interp = [](const std::vector<detail::Extremum>& e, double t) {
    auto it = std::upper_bound(e.begin(), e.end(), t,
                               [](double v, const detail::Extremum& x) { return v < x.t; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t);
  };
  const double t0 = std::max(up.front().t, lo.front().t);
  const double t1 = std::min(up.back().t, lo.back().t);
  Midline m;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.t[i];
    if (t <= t0 || t >= t1) continue;
    m.t.push_back(t);
    m.value.push_back(0.5 * (interp(up, t) + interp(lo, t)));
    m.index.push_back(i);
  }
  return m;
}

}  // namespace fanoqed
