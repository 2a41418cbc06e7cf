#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "fanoqed/dynamics.hpp"
#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"

namespace fanoqed {

// Basis order of the single-excitation space.
inline constexpr int kExcited = 0;  // |e,0>
inline constexpr int kPhoton = 1;   // |g,1>
inline constexpr int kVacuum = 2;   // |g,0>

using Operator3 = Eigen::Matrix3cd;
using Superoperator = Eigen::Matrix<std::complex<double>, 9, 9>;

struct DensityMatrixCheck {
  double hermiticity = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;  // |tr rho - 1|
  double min_eigenvalue = 0.0;
};

class OneExcitationDensityMatrix {
 public:
  OneExcitationDensityMatrix() : rho_(Operator3::Zero()) { rho_(kExcited, kExcited) = 1.0; }
  explicit OneExcitationDensityMatrix(const Operator3& rho) : rho_(rho) {}

  static OneExcitationDensityMatrix excited() { return {}; }
  static OneExcitationDensityMatrix vacuum() {
    Operator3 m = Operator3::Zero();
    m(kVacuum, kVacuum) = 1.0;
    return OneExcitationDensityMatrix(m);
  }

  const Operator3& matrix() const { return rho_; }

  DensityMatrixCheck check() const {
    DensityMatrixCheck c;
    c.hermiticity = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho_.trace() - std::complex<double>(1.0));
    const Operator3 herm = 0.5 * (rho_ + rho_.adjoint());
    c.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Operator3>(herm, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
    return c;
  }

  bool valid() const {
    const auto c = check();
    return c.hermiticity <= 1e-12 && c.trace_error <= 1e-10 && c.min_eigenvalue >= -1e-9;
  }

  BlochTriple expectations() const {
    // <sigma_+ a> = tr(|e,0><g,1| rho) = rho(g1, e0)
    return BlochTriple{rho_(kExcited, kExcited).real(), rho_(kPhoton, kPhoton).real(),
                       rho_(kPhoton, kExcited)};
  }

 private:
  Operator3 rho_;
};

struct SystemOperators {
  Operator3 sigma_minus = Operator3::Zero();
  Operator3 a = Operator3::Zero();
  Operator3 sigma_z = Operator3::Zero();
  Operator3 hamiltonian = Operator3::Zero();
};

/// Operators in the frame rotating at omega21 (so the TLS energy is zero and
/// the cavity sits at the detuning).
inline SystemOperators system_operators(const SystemParams& p) {
  const auto dc = derive_couplings_unchecked<double>(p);
  SystemOperators op;
  op.sigma_minus(kVacuum, kExcited) = 1.0;
  op.a(kVacuum, kPhoton) = 1.0;
  op.sigma_z.diagonal() << 1.0, -1.0, -1.0;
  // omega_c a^dag a + g sigma_+ a + g^* a^dag sigma_-
  op.hamiltonian(kPhoton, kPhoton) = dc.detuning;
  op.hamiltonian(kExcited, kPhoton) = dc.g;
  op.hamiltonian(kPhoton, kExcited) = std::conj(dc.g);
  return op;
}

namespace detail {

// 1/2 (2 A rho B^dag - B^dag A rho - rho B^dag A)
inline Operator3 cross_dissipator(const Operator3& a, const Operator3& b, const Operator3& rho) {
  const Operator3 bd = b.adjoint();
  return a * rho * bd - 0.5 * (bd * a * rho + rho * bd * a);
}

}  // namespace detail

/// Action of the master-equation generator on rho.
inline Operator3 apply_lindblad(const SystemParams& p, const Operator3& rho) {
  const auto dc = derive_couplings_unchecked<double>(p);
  const auto op = system_operators(p);
  const std::complex<double> i{0, 1};
  const Operator3& sm = op.sigma_minus;
  const Operator3& a = op.a;

  Operator3 out = -i * (op.hamiltonian * rho - rho * op.hamiltonian);
  out += p.gamma * detail::cross_dissipator(sm, sm, rho);
  out += p.kappa * detail::cross_dissipator(a, a, rho);
  // gamma_F/2 (2 a rho sigma_+ - sigma_+ a rho - rho sigma_+ a) and its mirror term
  out += dc.gamma_f * detail::cross_dissipator(a, sm, rho);
  out += std::conj(dc.gamma_f) * detail::cross_dissipator(sm, a, rho);
  out += 0.5 * p.gamma_ph * (op.sigma_z * rho * op.sigma_z - rho);
  return out;
}

/// The generator as a 9x9 matrix acting on column-major vec(rho).
inline Superoperator lindblad_generator(const SystemParams& p) {
  Superoperator s;
  for (int col = 0; col < 9; ++col) {
    Operator3 basis = Operator3::Zero();
    basis(col % 3, col / 3) = 1.0;
    const Operator3 image = apply_lindblad(p, basis);
    s.col(col) = Eigen::Map<const Eigen::Matrix<std::complex<double>, 9, 1>>(image.data());
  }
  return s;
}

using DensityObserver = std::function<void(double t, const Operator3& rho)>;

inline constexpr double kPositivityTolerance = 1e-7;

/// Integrates the master equation and records <sigma_+ sigma_->, <a^dag a>,
/// <sigma_+ a> at each grid time. Throws positivity_error if rho develops an
/// eigenvalue below -1e-7 at a sample.
inline Trajectory evolve_lindblad(const SystemParams& p, const OneExcitationDensityMatrix& rho0,
                                  std::span<const double> grid, const EvolveOptions& opt = {},
                                  const DensityObserver& on_sample = {}) {
  validate(p);
  detail::check_time_grid(grid);
  using Vec = Eigen::Matrix<std::complex<double>, 9, 1>;

  Trajectory traj;
  traj.params = p;
  traj.t.reserve(grid.size());
  traj.states.reserve(grid.size());
  const Superoperator gen = lindblad_generator(p);
  const Vec y0 = Eigen::Map<const Vec>(rho0.matrix().data());
  auto observe = [&](std::size_t, double t, const Vec& y) {
    const OneExcitationDensityMatrix rho(Eigen::Map<const Operator3>(y.data()));
    const double min_eig = rho.check().min_eigenvalue;
    if (min_eig < -kPositivityTolerance)
      throw positivity_error("density matrix lost positivity: eigenvalue " +
                                 std::to_string(min_eig) + " at t = " + std::to_string(t),
                             t, min_eig);
    traj.t.push_back(t);
    traj.states.push_back(rho.expectations());
    if (on_sample) on_sample(t, rho.matrix());
  };
  traj.method = detail::propagate_linear(gen, y0, grid, opt, observe, traj.stats, traj.step);
  if (traj.method == Integrator::adaptive) {
    traj.rtol = opt.adaptive.rtol;
    traj.atol = opt.adaptive.atol;
  }
  return traj;
}

}  // namespace fanoqed
