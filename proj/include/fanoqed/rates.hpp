#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <vector>

#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"

namespace fanoqed {

/// Coarse-grained rate matrix for (n_c, n_e),
///
///     d/dt [n_c]   [-(R+- + kappa)    R++         ] [n_c]
///          [n_e] = [ R--             -(R-+ + gamma)] [n_e]
///
/// and its eigenvalues, lambda_plus >= lambda_minus.
template <std::floating_point Real = double>
struct CoarseRateSystem {
  Real r_pp = 0, r_pm = 0, r_mp = 0, r_mm = 0;
  Real lambda_plus = 0, lambda_minus = 0;
  Real gamma = 0, kappa = 0;
  // Determinant of the rate matrix; equals lambda_plus * lambda_minus.
  Real det = 0;
  // |(R+- + kappa)(R-+ + gamma)| + |R++ R--|, the size of the two terms that
  // cancel in `det`.
  Real det_scale = 0;

  Real trace() const { return -(gamma + kappa + r_pm + r_mp); }
};

namespace detail {

template <std::floating_point Real>
Real coupling_product(std::complex<Real> a, std::complex<Real> b, std::complex<Real> den) {
  return std::real(Real(2) * a * std::conj(b) / den);
}

}  // namespace detail

template <std::floating_point Real = double>
CoarseRateSystem<Real> rate_coefficients(const DerivedCouplings<Real>& dc, const SystemParams& p) {
  using C = std::complex<Real>;
  const C den = C(0, dc.detuning) + C(dc.gamma_tot);

  CoarseRateSystem<Real> rs;
  rs.gamma = p.gamma;
  rs.kappa = p.kappa;
  rs.r_pp = detail::coupling_product(dc.g_plus, dc.g_plus, den);
  rs.r_pm = detail::coupling_product(dc.g_plus, dc.g_minus, den);
  rs.r_mp = detail::coupling_product(dc.g_minus, dc.g_plus, den);
  rs.r_mm = detail::coupling_product(dc.g_minus, dc.g_minus, den);

  const Real a = rs.r_pm + rs.kappa;
  const Real b = rs.r_mp + rs.gamma;
  rs.det = a * b - rs.r_pp * rs.r_mm;
  // Magnitude of the terms that cancel in det, for rounding-aware zero tests.
  rs.det_scale = (std::abs(rs.r_pm) + rs.kappa) * (std::abs(rs.r_mp) + rs.gamma) +
                 std::abs(rs.r_pp * rs.r_mm);

  // R++ and R-- share the sign of Re(den) > 0, so the discriminant is >= 0.
  const Real t = a + b;
  const Real half_gap = (a - b) / Real(2);
  const Real root = std::sqrt(half_gap * half_gap + rs.r_pp * rs.r_mm);
  // Take the root that adds magnitudes, recover the other from the product.
  if (t >= 0) {
    rs.lambda_minus = -t / Real(2) - root;
    rs.lambda_plus = rs.lambda_minus != 0 ? rs.det / rs.lambda_minus : Real(0);
  } else {
    rs.lambda_plus = -t / Real(2) + root;
    rs.lambda_minus = rs.lambda_plus != 0 ? rs.det / rs.lambda_plus : Real(0);
  }
  if (rs.lambda_plus < rs.lambda_minus) std::swap(rs.lambda_plus, rs.lambda_minus);
  return rs;
}

template <std::floating_point Real = double>
CoarseRateSystem<Real> rate_coefficients(const SystemParams& p) {
  return rate_coefficients(derive_couplings<Real>(p), p);
}

template <std::floating_point Real = double>
struct TransitionRate {
  Real value = 0;
  // Set when kappa < gamma; `value` is then -lambda_minus.
  bool regime_violation = false;

  operator Real() const { return value; }
};

template <std::floating_point Real = double>
TransitionRate<Real> transition_rate(const SystemParams& p) {
  const auto rs = rate_coefficients<Real>(p);
  if (p.kappa < p.gamma) return {-rs.lambda_minus, true};
  return {-rs.lambda_plus, false};
}

/// gamma + R-+
template <std::floating_point Real = double>
Real transition_rate_weak(const SystemParams& p) {
  const auto rs = rate_coefficients<Real>(p);
  return Real(p.gamma) + rs.r_mp;
}

/// gamma + 2|g|^2 Gamma / (detuning^2 + Gamma^2)
template <std::floating_point Real = double>
Real purcell_rate(const SystemParams& p) {
  const auto dc = derive_couplings<Real>(p);
  const Real g2 = Real(p.g_abs) * Real(p.g_abs);
  const Real gt = dc.gamma_tot;
  return Real(p.gamma) + Real(2) * g2 * gt / (dc.detuning * dc.detuning + gt * gt);
}

template <std::floating_point Real>
Real fano_formula(std::complex<Real> q, Real eps, Real gamma) {
  if (!(gamma > 0)) throw parameter_error("fano_formula: gamma must be positive");
  return gamma * std::norm(q + eps) / (eps * eps + Real(1));
}

inline double fano_formula(std::complex<double> q, double eps, double gamma) {
  return fano_formula<double>(q, eps, gamma);
}

struct RateRow {
  double eps = 0;
  double tls_minus_cavity = 0;  // omega21 - omega_c in ueV
  double w_full = 0;
  double w_weak = 0;
  double w_fano = 0;
  bool regime_violation = false;
};

inline RateRow rate_row(const SystemParams& base, double eps) {
  const SystemParams p = with_reduced_detuning(base, eps);
  const auto dc = derive_couplings<double>(p);
  const auto w = transition_rate<double>(p);
  RateRow row;
  row.eps = eps;
  row.tls_minus_cavity = p.omega21 - p.omega_c;
  row.w_full = w.value;
  row.regime_violation = w.regime_violation;
  row.w_weak = transition_rate_weak<double>(p);
  row.w_fano = fano_formula(dc.q, eps, p.gamma);
  return row;
}

/// n evenly spaced points on [lo, hi]; both ends are included exactly.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out[n - 1] = hi;
  return out;
}

inline std::vector<RateRow> rate_sweep(const SystemParams& p, double eps_lo, double eps_hi,
                                       std::size_t n) {
  if (n < 2) throw parameter_error("rate_sweep needs at least two points");
  validate(p);
  std::vector<RateRow> rows;
  rows.reserve(n);
  for (double eps : linspace(eps_lo, eps_hi, n)) rows.push_back(rate_row(p, eps));
  return rows;
}

}  // namespace fanoqed
