#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fanoqed/dynamics.hpp"
#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/quadrature.hpp"
#include "fanoqed/rates.hpp"

// Spectra are expressed in the frame rotating at omega21: frequencies nu are
// offsets from the TLS transition and the cavity sits at omega_c - omega21.

namespace fanoqed {

template <std::floating_point Real = double>
struct SpectralPoles {
  std::complex<Real> gamma_plus;
  std::complex<Real> gamma_minus;
};

template <std::floating_point Real = double>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;

/// Generator of (<sigma_->, <a>) in the single-excitation sector.
template <std::floating_point Real = double>
Matrix2c<Real> regression_matrix(const SystemParams& p) {
  using C = std::complex<Real>;
  const auto dc = derive_couplings<Real>(p);
  const C i{0, 1};
  Matrix2c<Real> m;
  m << -(Real(p.gamma) / 2 + Real(p.gamma_ph)), -i * dc.g_minus,
      -i * std::conj(dc.g_plus), -(C(0, dc.detuning) + Real(p.kappa) / 2);
  return m;
}

template <std::floating_point Real = double>
SpectralPoles<Real> spectral_poles(const SystemParams& p) {
  using C = std::complex<Real>;
  const auto dc = derive_couplings<Real>(p);
  const C half_sum = -C(dc.gamma_tot, dc.detuning) / Real(2);
  const C x = C((Real(p.kappa) - Real(p.gamma)) / 2 - Real(p.gamma_ph), dc.detuning);
  const C root = std::sqrt(x * x - Real(4) * std::conj(dc.g_plus) * dc.g_minus);
  const C product = (Real(p.gamma) / 2 + Real(p.gamma_ph)) * C(Real(p.kappa) / 2, dc.detuning) +
                    dc.g_minus * std::conj(dc.g_plus);

  // gamma_+ takes the principal root. Of the two, evaluate the larger one
  // directly and the other through the product.
  SpectralPoles<Real> poles;
  const C plus = half_sum + root / Real(2);
  const C minus = half_sum - root / Real(2);
  if (std::abs(plus) >= std::abs(minus)) {
    poles.gamma_plus = plus;
    poles.gamma_minus = plus != C(0) ? product / plus : minus;
  } else {
    poles.gamma_minus = minus;
    poles.gamma_plus = minus != C(0) ? product / minus : plus;
  }
  return poles;
}

template <std::floating_point Real = double>
struct IntegratedMoments {
  Real i_e = 0;
  Real i_c = 0;
  std::complex<Real> i_p{};
};

/// Exact time integrals of the coarse-grained n_e, n_c and of the adiabatic
/// polarization, for the excited-TLS initial state.
template <std::floating_point Real = double>
IntegratedMoments<Real> integrated_moments(const SystemParams& p) {
  const auto dc = derive_couplings<Real>(p);
  const auto rs = rate_coefficients(dc, p);
  const Real floor = Real(32) * std::numeric_limits<Real>::epsilon() * rs.det_scale;
  if (!(rs.det > floor) || !(rs.lambda_plus < 0))
    throw divergent_moment_error("coarse-grained solution does not decay (lambda_+ = " +
                                 std::to_string(static_cast<double>(rs.lambda_plus)) +
                                 "); time-integrated moments diverge");
  // Integrating the rate equations from (n_c, n_e) = (0, 1) to 0 gives
  // A [I_c, I_e] = -[0, 1], solved here by Cramer's rule.
  IntegratedMoments<Real> m;
  m.i_e = (rs.r_pm + Real(p.kappa)) / rs.det;
  m.i_c = rs.r_pp / rs.det;
  m.i_p = adiabatic_polarization(dc, m.i_e, m.i_c);
  return m;
}

/// Time integrals of the full three-variable equations of motion,
/// -A^{-1} y(0), for comparison with the coarse-grained moments.
inline IntegratedMoments<double> integrated_moments_full(const SystemParams& p) {
  validate(p);
  const Eigen::Matrix4d a = triple_generator(p);
  const Eigen::Vector4d y0(0.0, 1.0, 0.0, 0.0);
  const Eigen::Vector4d y = -a.fullPivLu().solve(y0);
  IntegratedMoments<double> m;
  m.i_c = y[0];
  m.i_e = y[1];
  m.i_p = {y[2], y[3]};
  return m;
}

/// gamma I_e + kappa I_c + 2 Re(gamma_F I_p): the number of photons emitted.
template <std::floating_point Real>
Real photon_sum(const SystemParams& p, const IntegratedMoments<Real>& m) {
  const auto dc = derive_couplings<Real>(p);
  return Real(p.gamma) * m.i_e + Real(p.kappa) * m.i_c + Real(2) * std::real(dc.gamma_f * m.i_p);
}

enum class Component { tls, cavity, cross };

inline constexpr std::array<Component, 3> kComponents = {Component::tls, Component::cavity,
                                                         Component::cross};

inline const char* to_string(Component c) {
  switch (c) {
    case Component::tls: return "S21";
    case Component::cavity: return "Sc";
    case Component::cross: return "SF";
  }
  return "?";
}

/// f(x) = c0 + c1 x, the numerators of the spectral partial fractions.
template <std::floating_point Real>
struct LinearForm {
  std::complex<Real> c0{}, c1{};
  std::complex<Real> operator()(std::complex<Real> x) const { return c0 + c1 * x; }
};

enum class MomentSource { coarse_grained, full_ode };

/// Everything needed to evaluate S_alpha(nu, ds) at many frequencies.
template <std::floating_point Real = double>
struct SpectrumModel {
  using C = std::complex<Real>;

  SpectralPoles<Real> poles;
  IntegratedMoments<Real> moments;
  std::array<LinearForm<Real>, 3> f;  // indexed by Component
  Real ds = 0;
  Real sum_rule = 0;

  const LinearForm<Real>& form(Component c) const { return f[static_cast<std::size_t>(c)]; }

  /// Re[(f(g+)/(i nu + g+ - ds/2) - f(g-)/(i nu + g- - ds/2)) / (g+ - g-)].
  /// With f linear and w = i nu - ds/2 this equals
  /// Re[(c1 w - c0) / ((w + g+)(w + g-))], which is also the confluent limit
  /// when g+ = g-.
  Real evaluate(Component c, Real nu) const {
    const C w(-ds / 2, nu);
    const auto& lf = form(c);
    return std::real((lf.c1 * w - lf.c0) / ((w + poles.gamma_plus) * (w + poles.gamma_minus)));
  }

  Real evaluate_total(Real nu) const {
    const C w(-ds / 2, nu);
    const C num = (f[0].c1 + f[1].c1 + f[2].c1) * w - (f[0].c0 + f[1].c0 + f[2].c0);
    return std::real(num / ((w + poles.gamma_plus) * (w + poles.gamma_minus)));
  }

  /// The two-pole form evaluated literally; degenerate poles fall back to the
  /// derivative of f(x)/(i nu + x - ds/2).
  Real evaluate_pole_form(Component c, Real nu) const {
    const C w(-ds / 2, nu);
    const auto& lf = form(c);
    const C gp = poles.gamma_plus, gm = poles.gamma_minus;
    if (std::abs(gp - gm) < Real(1e-9) * std::abs(gp)) {
      const C x = (gp + gm) / Real(2);
      const C z = w + x;
      return std::real((lf.c1 * z - lf(x)) / (z * z));
    }
    return std::real((lf(gp) / (w + gp) - lf(gm) / (w + gm)) / (gp - gm));
  }

  /// Integral over all nu, -pi Re[(f(g+) - f(g-)) / (g+ - g-)] = -pi Re c1.
  Real weight(Component c) const { return -std::numbers::pi_v<Real> * std::real(form(c).c1); }

  /// Integral of S_alpha over [nu_lo, nu_hi], in closed form.
  Real window_integral(Component c, Real nu_lo, Real nu_hi) const {
    const auto& lf = form(c);
    const C gp = poles.gamma_plus, gm = poles.gamma_minus;
    // Antiderivative of 1/(i nu + z) with Re z < 0 is -i log(-(i nu + z));
    // the argument stays in the right half plane, so the principal log is
    // continuous in nu.
    auto prim = [&](C z, Real nu) { return C(0, -1) * std::log(-(C(0, nu) + z)); };
    const C shift(-ds / 2, 0);
    if (std::abs(gp - gm) < Real(1e-6) * std::abs(gp)) {
      QuadratureOptions opt;
      opt.rtol = 1e-12;
      auto g = [&](double nu) { return static_cast<double>(evaluate(c, Real(nu))); };
      return Real(integrate(g, static_cast<double>(nu_lo), static_cast<double>(nu_hi), opt).value);
    }
    const C a = lf(gp) * (prim(gp + shift, nu_hi) - prim(gp + shift, nu_lo));
    const C b = lf(gm) * (prim(gm + shift, nu_hi) - prim(gm + shift, nu_lo));
    return std::real((a - b) / (gp - gm));
  }
};

template <std::floating_point Real = double>
SpectrumModel<Real> spectrum_model(const SystemParams& p, double ds,
                                   MomentSource source = MomentSource::coarse_grained) {
  using C = std::complex<Real>;
  if (!(ds > 0.0) || !std::isfinite(ds)) throw parameter_error("filter width ds must be positive");
  const auto dc = derive_couplings<Real>(p);
  SpectrumModel<Real> sm;
  sm.ds = ds;
  sm.poles = spectral_poles<Real>(p);
  if (source == MomentSource::coarse_grained) {
    sm.moments = integrated_moments<Real>(p);
  } else {
    const auto full = integrated_moments_full(p);
    sm.moments = {Real(full.i_e), Real(full.i_c), C(full.i_p.real(), full.i_p.imag())};
  }
  sm.sum_rule = photon_sum(p, sm.moments);

  const C i{0, 1};
  const Real pi = std::numbers::pi_v<Real>;
  const Real gamma = p.gamma, kappa = p.kappa, gph = p.gamma_ph;
  const C ie = sm.moments.i_e, ic = sm.moments.i_c, ip = sm.moments.i_p;
  const C ipc = std::conj(ip);
  const C gf = dc.gamma_f, gfc = std::conj(dc.gamma_f);
  const C gm = dc.g_minus, gpc = std::conj(dc.g_plus);
  // x + i omega_c + kappa/2 and x + i omega21 + gamma_ph + gamma/2
  const C cav_shift = C(kappa / 2, dc.detuning);
  const C tls_shift = C(gph + gamma / 2, 0);

  auto& f21 = sm.f[static_cast<std::size_t>(Component::tls)];
  f21.c0 = gamma / pi * (i * gm * ip - cav_shift * ie);
  f21.c1 = -gamma / pi * ie;

  auto& fc = sm.f[static_cast<std::size_t>(Component::cavity)];
  fc.c0 = kappa / pi * (i * gpc * ipc - tls_shift * ic);
  fc.c1 = -kappa / pi * ic;

  auto& ff = sm.f[static_cast<std::size_t>(Component::cross)];
  ff.c0 = (i * gm * gfc * ic + i * gpc * gf * ie - cav_shift * gfc * ipc - tls_shift * gf * ip) / pi;
  ff.c1 = -(gfc * ipc + gf * ip) / pi;
  return sm;
}

template <std::floating_point Real = double>
Real spectrum_component(const SystemParams& p, double nu, double ds, Component which) {
  return spectrum_model<Real>(p, ds).evaluate(which, Real(nu));
}

/// Same spectrum through the resolvent R = (z - M)^{-1}, z = ds/2 - i nu, of
/// the regression matrix instead of the pole expansion.
template <std::floating_point Real = double>
Real spectrum_component_resolvent(const SystemParams& p, const IntegratedMoments<Real>& m,
                                  double nu, double ds, Component which) {
  using C = std::complex<Real>;
  const auto dc = derive_couplings<Real>(p);
  const Matrix2c<Real> mat = regression_matrix<Real>(p);
  const C z(Real(ds) / 2, -Real(nu));
  const Matrix2c<Real> r = (z * Matrix2c<Real>::Identity() - mat).inverse();
  const Real pi = std::numbers::pi_v<Real>;
  const C ie = m.i_e, ic = m.i_c, ip = m.i_p;
  switch (which) {
    case Component::tls:
      return Real(p.gamma) / pi * std::real(r(0, 0) * ie + r(0, 1) * ip);
    case Component::cavity:
      return Real(p.kappa) / pi * std::real(r(1, 0) * std::conj(ip) + r(1, 1) * ic);
    case Component::cross:
    default:
      return std::real(dc.gamma_f * (r(1, 0) * ie + r(1, 1) * ip) +
                       std::conj(dc.gamma_f) * (r(0, 0) * std::conj(ip) + r(0, 1) * ic)) /
             pi;
  }
}

struct SpectrumComponents {
  std::vector<double> nu;  // relative to omega21
  std::vector<double> s21, s_c, s_f, total;
  double ds = 0.0;
  double sum_rule = 0.0;
};

template <std::floating_point Real = double>
SpectrumComponents total_spectrum(const SystemParams& p, std::span<const double> nu_grid, double ds,
                                  MomentSource source = MomentSource::coarse_grained) {
  const auto sm = spectrum_model<Real>(p, ds, source);
  SpectrumComponents out;
  out.ds = ds;
  out.sum_rule = static_cast<double>(sm.sum_rule);
  const std::size_t n = nu_grid.size();
  out.nu.assign(nu_grid.begin(), nu_grid.end());
  out.s21.resize(n);
  out.s_c.resize(n);
  out.s_f.resize(n);
  out.total.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Real nu = nu_grid[k];
    const Real a = sm.evaluate(Component::tls, nu);
    const Real b = sm.evaluate(Component::cavity, nu);
    const Real c = sm.evaluate(Component::cross, nu);
    out.s21[k] = static_cast<double>(a);
    out.s_c[k] = static_cast<double>(b);
    out.s_f[k] = static_cast<double>(c);
    out.total[k] = static_cast<double>(a + b + c);
  }
  return out;
}

/// n points on [min(0, wc) - 20 ds - 5|g|, max(0, wc) + 20 ds + 5|g|], where
/// wc = omega_c - omega21.
inline std::vector<double> default_frequency_grid(const SystemParams& p, double ds,
                                                  std::size_t n = 2001) {
  const double wc = p.detuning();
  const double pad = 20.0 * ds + 5.0 * p.g_abs;
  return linspace(std::min(0.0, wc) - pad, std::max(0.0, wc) + pad, n);
}

/// True when the grid reaches 10 max(kappa, ds, |g|) beyond both resonances.
inline bool grid_margin_ok(const SystemParams& p, std::span<const double> nu_grid, double ds) {
  if (nu_grid.empty()) return false;
  const double wc = p.detuning();
  const double margin = 10.0 * std::max({p.kappa, ds, p.g_abs});
  return nu_grid.front() <= std::min(0.0, wc) - margin && nu_grid.back() >= std::max(0.0, wc) + margin;
}

/// Trapezoid rule on a sorted grid.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace fanoqed
