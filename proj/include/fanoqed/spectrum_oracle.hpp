#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "fanoqed/dynamics.hpp"
#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/quadrature.hpp"
#include "fanoqed/rates.hpp"
#include "fanoqed/spectra.hpp"
#include "fanoqed/sweep.hpp"

// Brute-force spectrum from two-time correlators.
//
// The filtered spectrum is (1/pi) Re of a double integral over the emission
// time t and the delay tau of
//
//     e^{(i nu - ds/2) tau} sum_jk C_jk(tau) X_jk(t - tau),
//
// where C(tau) = exp(tau M) propagates (<sigma_->, <a>) and X(s) = W rho(s)
// weights the single-time moments rho = [[n_e, p], [p^*, n_c]] by the
// decay matrix. Substituting s = t - tau splits the triangle 0 <= tau <= t
// into a product of two half-line integrals, both done numerically here.

namespace fanoqed {

struct OracleOptions {
  double rtol = 1e-4;           // on each delay integral
  double atol = 1e-13;          // absolute floor, units of 1/ueV
  double moment_rtol = 1e-12;   // on the single-time integrals
};

class SpectrumOracle {
 public:
  SpectrumOracle(const SystemParams& p, double ds, const OracleOptions& opt = {})
      : p_(p), ds_(ds), opt_(opt) {
    validate(p);
    if (!(ds > 0.0)) throw parameter_error("filter width ds must be positive");
    integrate_moments();
    build_weights();
    decompose();
  }

  /// Numerically integrated [[I_e, I_p], [I_p^*, I_c]].
  const Eigen::Matrix2cd& moment_matrix() const { return rho_bar_; }
  double moment_error() const { return moment_error_; }

  /// Total S(nu, ds); `error` receives the quadrature error estimate.
  double total(double nu, double* error = nullptr) const { return evaluate(x_total_, nu, error); }

  double component(Component c, double nu, double* error = nullptr) const {
    return evaluate(x_[static_cast<std::size_t>(c)], nu, error);
  }

 private:
  void integrate_moments() {
    const auto dc = derive_couplings<double>(p_);
    const auto rs = rate_coefficients(dc, p_);
    if (!(rs.lambda_plus < 0.0))
      throw divergent_moment_error("coarse-grained solution does not decay");
    auto rho = [&](double s) {
      const auto st = coarse_grained_solution(rs, s);
      const std::complex<double> pol = adiabatic_polarization(dc, st.n_e, st.n_c);
      Eigen::Matrix2cd m;
      m << st.n_e, pol, std::conj(pol), st.n_c;
      return m;
    };
    // Doubling panels from well inside the fast decay to far past the slow one.
    std::vector<double> breaks{0.0};
    double s = 0.01 / std::abs(rs.lambda_minus);
    const double end = 50.0 / std::abs(rs.lambda_plus);
    while (s < end) {
      breaks.push_back(s);
      s *= 2.0;
    }
    breaks.push_back(std::max(s, end));
    QuadratureOptions qo;
    qo.rtol = opt_.moment_rtol;
    const auto r = integrate_panels(rho, std::span<const double>(breaks), qo);
    require_converged(r, "single-time moment integral did not converge");
    rho_bar_ = r.value;
    moment_error_ = r.error;
  }

  void build_weights() {
    const auto dc = derive_couplings<double>(p_);
    const Eigen::Matrix2cd& r = rho_bar_;
    const std::complex<double> gf = dc.gamma_f;
    Eigen::Matrix2cd x21 = Eigen::Matrix2cd::Zero(), xc = Eigen::Matrix2cd::Zero(), xf;
    x21.row(0) = p_.gamma * r.row(0);
    xc.row(1) = p_.kappa * r.row(1);
    xf.row(0) = std::conj(gf) * r.row(1);
    xf.row(1) = gf * r.row(0);
    x_ = {x21, xc, xf};
    x_total_ = x21 + xc + xf;
  }

  void decompose() {
    m_ = regression_matrix<double>(p_);
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m_);
    v_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(v_);
    const double cond = svd.singularValues()(0) / svd.singularValues()(1);
    use_expm_ = !(cond < 1e8);
    if (!use_expm_) v_inv_ = v_.inverse();
    const double slowest = std::min(-lambda_(0).real(), -lambda_(1).real());
    horizon_ = 37.0 / (0.5 * ds_ + std::max(0.0, slowest));
  }

  double evaluate(const Eigen::Matrix2cd& x, double nu, double* error) const {
    const std::complex<double> z(0.5 * ds_, -nu);
    QuadratureOptions qo;
    qo.rtol = opt_.rtol;
    qo.atol = opt_.atol * std::numbers::pi;
    double fastest = 0.0;
    for (int m = 0; m < 2; ++m) fastest = std::max(fastest, std::abs(lambda_(m).imag() + nu));
    qo.initial_subdivisions =
        4 + static_cast<std::size_t>(std::ceil(2.0 * fastest * horizon_ / (2.0 * std::numbers::pi)));

    QuadratureResult<double> r;
    if (!use_expm_) {
      std::complex<double> c[2];
      for (int m = 0; m < 2; ++m) {
        c[m] = 0.0;
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) c[m] += v_(j, m) * v_inv_(m, k) * x(j, k);
      }
      const std::complex<double> e0 = lambda_(0) - z, e1 = lambda_(1) - z;
      auto integrand = [&](double tau) {
        return std::real(c[0] * std::exp(e0 * tau) + c[1] * std::exp(e1 * tau));
      };
      r = integrate(integrand, 0.0, horizon_, qo);
    } else {
      auto integrand = [&](double tau) {
        const Eigen::Matrix2cd prop = (tau * m_).exp();
        return std::real(std::exp(-z * tau) * prop.cwiseProduct(x).sum());
      };
      r = integrate(integrand, 0.0, horizon_, qo);
    }
    require_converged(r, "delay integral did not converge");
    if (error) *error = r.error / std::numbers::pi;
    return r.value / std::numbers::pi;
  }

  SystemParams p_;
  double ds_;
  OracleOptions opt_;
  Eigen::Matrix2cd rho_bar_;
  double moment_error_ = 0.0;
  std::array<Eigen::Matrix2cd, 3> x_;
  Eigen::Matrix2cd x_total_;
  Eigen::Matrix2cd m_, v_, v_inv_;
  Eigen::Vector2cd lambda_;
  bool use_expm_ = false;
  double horizon_ = 0.0;
};

/// Total S(nu, ds) from the correlator double integral.
inline double spectrum_quadrature_oracle(const SystemParams& p, double nu, double ds,
                                         const OracleOptions& opt = {}) {
  return SpectrumOracle(p, ds, opt).total(nu);
}

inline std::vector<double> oracle_spectrum(const SystemParams& p, std::span<const double> nu_grid,
                                           double ds, unsigned workers = 0,
                                           const OracleOptions& opt = {}) {
  const SpectrumOracle oracle(p, ds, opt);
  std::vector<double> out(nu_grid.size());
  parallel_for(nu_grid.size(), workers, [&](std::size_t i) { out[i] = oracle.total(nu_grid[i]); });
  return out;
}

}  // namespace fanoqed
