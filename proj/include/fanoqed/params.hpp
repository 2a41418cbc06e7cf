#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "fanoqed/errors.hpp"

namespace fanoqed {

// All energies and rates are in micro-eV with hbar = 1; times are therefore in
// units of hbar/ueV. One such unit is 658.2119569 fs.
inline constexpr double kHbarMicroeVFemtoseconds = 658.2119569;
inline constexpr double kTimeUnitPicoseconds = kHbarMicroeVFemtoseconds * 1e-3;

/// Physical inputs of the emitter-cavity model.
///
/// Absolute transition energies are stored as given, but every computation
/// only consumes differences, so `omega21` may be left at zero and `omega_c`
/// set to the detuning.
struct SystemParams {
  double omega21 = 0.0;   // TLS transition energy
  double omega_c = 0.0;   // cavity resonance
  double g_abs = 100.0;   // |g|
  double phi = std::numbers::pi / 2;  // arg g
  double gamma = 0.05;    // TLS radiative decay
  double kappa = 50.0;    // cavity decay
  double gamma_ph = 0.0;  // TLS pure dephasing
  double eta = 1.0;       // far-field radiation pattern overlap, [0, 1]
  double theta21 = std::numbers::pi / 2;  // phase of the TLS-continuum coupling
  double theta_c = 0.0;   // phase of the cavity-continuum coupling

  /// omega_c - omega21
  double detuning() const { return omega_c - omega21; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

inline void validate(const SystemParams& p) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(p.omega21) && finite(p.omega_c) && finite(p.g_abs) &&
        finite(p.phi) && finite(p.gamma) && finite(p.kappa) &&
        finite(p.gamma_ph) && finite(p.eta) && finite(p.theta21) &&
        finite(p.theta_c))) {
    throw parameter_error("system parameters must be finite");
  }
  if (!(p.gamma > 0.0)) throw parameter_error("gamma must be positive");
  if (!(p.kappa > 0.0)) throw parameter_error("kappa must be positive");
  if (p.gamma_ph < 0.0) throw parameter_error("gamma_ph must be non-negative");
  if (p.g_abs < 0.0) throw parameter_error("|g| must be non-negative");
  if (p.eta < 0.0 || p.eta > 1.0)
    throw parameter_error("eta must lie in [0, 1], got " + std::to_string(p.eta));
}

/// Returns a copy of `p` with the cavity placed at reduced detuning `eps`.
inline SystemParams with_reduced_detuning(SystemParams p, double eps) {
  p.omega_c = p.omega21 - 0.5 * eps * p.kappa;
  return p;
}

/// Returns a copy of `p` with omega21 - omega_c = `tls_minus_cavity`.
inline SystemParams with_tls_cavity_offset(SystemParams p, double tls_minus_cavity) {
  p.omega_c = p.omega21 - tls_minus_cavity;
  return p;
}

/// epsilon = 2 (omega21 - omega_c) / kappa
inline double reduced_detuning(const SystemParams& p) {
  if (!(p.kappa > 0.0)) throw parameter_error("kappa must be positive");
  return 2.0 * (p.omega21 - p.omega_c) / p.kappa;
}

template <std::floating_point Real = double>
struct DerivedCouplings {
  using complex_type = std::complex<Real>;

  complex_type g;          // |g| e^{i phi}
  complex_type gamma_f;    // cross decay rate
  complex_type g_plus;     // g + i gamma_f / 2
  complex_type g_minus;    // g - i gamma_f / 2
  Real gamma_tot;          // (gamma + kappa)/2 + gamma_ph
  complex_type q;          // Fano parameter
  Real eps;                // reduced detuning
  Real detuning;           // omega_c - omega21
};

/// Same as derive_couplings() but without the physical range checks; used by
/// diagnostics that must report *why* a parameter set is unphysical.
template <std::floating_point Real = double>
DerivedCouplings<Real> derive_couplings_unchecked(const SystemParams& p) {
  using C = std::complex<Real>;
  const Real gamma = p.gamma;
  const Real kappa = p.kappa;
  const Real eta = p.eta;
  const C i{0, 1};

  DerivedCouplings<Real> d;
  d.g = std::polar(Real(p.g_abs), Real(p.phi));
  d.gamma_f = std::polar(std::sqrt(eta * gamma * kappa), Real(p.theta21) - Real(p.theta_c));
  d.g_plus = d.g + i * d.gamma_f / Real(2);
  d.g_minus = d.g - i * d.gamma_f / Real(2);
  d.gamma_tot = (gamma + kappa) / Real(2) + Real(p.gamma_ph);
  d.q = std::polar(Real(2) * Real(p.g_abs) / std::sqrt(gamma * kappa),
                   Real(p.phi) + Real(p.theta_c) - Real(p.theta21));
  d.detuning = Real(p.omega_c) - Real(p.omega21);
  d.eps = Real(2) * (Real(p.omega21) - Real(p.omega_c)) / kappa;
  return d;
}

template <std::floating_point Real = double>
DerivedCouplings<Real> derive_couplings(const SystemParams& p) {
  validate(p);
  return derive_couplings_unchecked<Real>(p);
}

/// Collective decay matrix [[gamma, gamma_F^*], [gamma_F, kappa]]. It is
/// positive semidefinite exactly when eta <= 1.
inline Eigen::Matrix2cd collective_decay_matrix(const SystemParams& p) {
  const auto d = derive_couplings_unchecked<double>(p);
  Eigen::Matrix2cd m;
  m << p.gamma, std::conj(d.gamma_f), d.gamma_f, p.kappa;
  return m;
}

/// Smallest eigenvalue of collective_decay_matrix(), evaluated in closed form.
inline double min_decay_eigenvalue(const SystemParams& p) {
  const double cross2 = std::max(p.eta, 0.0) * p.gamma * p.kappa;
  const double half_diff = 0.5 * (p.gamma - p.kappa);
  return 0.5 * (p.gamma + p.kappa) - std::sqrt(half_diff * half_diff + cross2);
}

}  // namespace fanoqed
