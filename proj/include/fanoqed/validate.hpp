#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fanoqed/csv.hpp"
#include "fanoqed/dynamics.hpp"
#include "fanoqed/errors.hpp"
#include "fanoqed/lindblad.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/random_params.hpp"
#include "fanoqed/rates.hpp"
#include "fanoqed/spectra.hpp"

namespace fanoqed {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;  // offending parameter set on failure
};

inline std::string describe(const SystemParams& p) {
  std::ostringstream os;
  os << "{omega21=" << format_number(p.omega21) << ", omegaC=" << format_number(p.omega_c)
     << ", gAbs=" << format_number(p.g_abs) << ", phi=" << format_number(p.phi)
     << ", gamma=" << format_number(p.gamma) << ", kappa=" << format_number(p.kappa)
     << ", gammaPh=" << format_number(p.gamma_ph) << ", eta=" << format_number(p.eta)
     << ", theta21=" << format_number(p.theta21) << ", thetaC=" << format_number(p.theta_c) << "}";
  return os.str();
}

namespace detail {

// Tracks the worst metric over many cases and remembers who produced it.
class Tally {
 public:
  Tally(std::string name, double tol) { r_.name = std::move(name); r_.tolerance = tol; }

  void add(double metric, const SystemParams& p, const std::string& note = {}) {
    ++r_.cases;
    const bool bad = !(metric <= r_.tolerance);
    if (bad && r_.passed) {
      r_.passed = false;
      r_.detail = (note.empty() ? "" : note + " ") + "at " + describe(p);
    }
    if (!std::isnan(r_.worst) && !(metric <= r_.worst)) r_.worst = metric;
  }

  void fail(const std::string& why, const SystemParams& p) {
    ++r_.cases;
    if (r_.passed) r_.detail = why + " at " + describe(p);
    r_.passed = false;
  }

  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

inline double rel(double a, double b, double scale) { return std::abs(a - b) / scale; }

inline Operator3 random_hermitian(RandomParams& rng) {
  Operator3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return 0.5 * (m + m.adjoint());
}

// Parameter set with time-integrated moments that are safely finite.
inline SystemParams draw_decaying(RandomParams& rng) {
  for (;;) {
    const SystemParams p = rng();
    const auto rs = rate_coefficients<double>(p);
    if (rs.det > 1e-6 * rs.det_scale && rs.lambda_plus < 0.0) return p;
  }
}

}  // namespace detail

/// The invariant battery behind `validate`. `injected` is checked for
/// physical admissibility first; random draws come from `seed`.
inline std::vector<CheckResult> run_validation(const SystemParams& injected, std::uint64_t seed,
                                               std::size_t draws) {
  using C = std::complex<double>;
  using detail::rel;
  using detail::Tally;
  std::vector<CheckResult> out;
  RandomParams rng(seed);
  std::vector<SystemParams> sample(draws);
  for (auto& p : sample) p = rng();

  // Positive semidefinite decay matrix, configured set first.
  {
    Tally t("decay_matrix_psd[configured]", 1e-12);
    const Eigen::Matrix2cd m = collective_decay_matrix(injected);
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    const double scale = std::max(injected.kappa, 1e-300);
    t.add(std::max(0.0, -min_eig / scale), injected,
          "min eigenvalue " + format_number(min_eig) + " ueV");
    out.push_back(t.result());
  }
  {
    Tally t("decay_matrix_psd", 1e-12);
    for (const auto& p : sample) {
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(
                                 collective_decay_matrix(p), Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .minCoeff();
      t.add(std::max(0.0, -min_eig / p.kappa), p, "min eigenvalue " + format_number(min_eig));
    }
    out.push_back(t.result());
  }
  {
    Tally t("coupling_identities", 1e-12);
    for (const auto& p : sample) {
      const auto dc = derive_couplings<double>(p);
      const double target = p.eta * p.gamma * p.kappa;
      double m = std::abs(std::norm(dc.gamma_f) - target) / std::max(target, p.gamma * p.kappa);
      m = std::max(m, std::abs((dc.g_plus - dc.g_minus) - C(0, 1) * dc.gamma_f) /
                          std::max(1.0, std::abs(dc.gamma_f)));
      m = std::max(m, rel(dc.gamma_tot, (p.gamma + p.kappa) / 2 + p.gamma_ph, dc.gamma_tot));
      t.add(m, p);
    }
    out.push_back(t.result());
  }
  {
    Tally vieta("rate_vieta", 1e-10), oracle("rate_eigen_oracle", 1e-10), order("rate_branch_order", 0.0);
    for (const auto& p : sample) {
      const auto rs = rate_coefficients<double>(p);
      const double scale = std::max({std::abs(rs.lambda_plus), std::abs(rs.lambda_minus)});
      const double tr = -(p.gamma + p.kappa + rs.r_pm + rs.r_mp);
      const double det = (rs.r_pm + p.kappa) * (rs.r_mp + p.gamma) - rs.r_pp * rs.r_mm;
      double m = rel(rs.lambda_plus + rs.lambda_minus, tr, std::abs(tr));
      m = std::max(m, std::abs(rs.lambda_plus * rs.lambda_minus - det) / std::max(std::abs(det), rs.det_scale * 1e-6));
      vieta.add(m, p);

      Eigen::Matrix2d a;
      a << -(rs.r_pm + p.kappa), rs.r_pp, rs.r_mm, -(rs.r_mp + p.gamma);
      const Eigen::Vector2cd ev = Eigen::EigenSolver<Eigen::Matrix2d>(a, false).eigenvalues();
      double e0 = ev(0).real(), e1 = ev(1).real();
      if (e0 < e1) std::swap(e0, e1);
      oracle.add(std::max(std::abs(e0 - rs.lambda_plus), std::abs(e1 - rs.lambda_minus)) / scale, p);
      order.add(rs.lambda_plus >= rs.lambda_minus ? 0.0 : 1.0, p);
    }
    out.push_back(vieta.result());
    out.push_back(oracle.result());
    out.push_back(order.result());
  }
  {
    Tally equal("eta0_rates_equal", 1e-12), sym("eta0_symmetry", 1e-10), purcell("purcell_recovery", 1e-12);
    for (auto p : sample) {
      p.eta = 0.0;
      const auto rs = rate_coefficients<double>(p);
      const double s = std::abs(rs.r_pp);
      const double spread = std::max({std::abs(rs.r_pm - rs.r_pp), std::abs(rs.r_mp - rs.r_pp),
                                      std::abs(rs.r_mm - rs.r_pp)});
      equal.add(s > 0 ? spread / s : spread, p);
      SystemParams mirror = p;
      mirror.omega_c = 2.0 * p.omega21 - p.omega_c;
      const double w = transition_rate<double>(p), wm = transition_rate<double>(mirror);
      sym.add(rel(w, wm, std::abs(w)), p);
      const double weak = transition_rate_weak<double>(p), pr = purcell_rate<double>(p);
      purcell.add(rel(weak, pr, pr), p);
    }
    out.push_back(equal.result());
    out.push_back(sym.result());
    out.push_back(purcell.result());
  }
  {
    // Weak-coupling rate against the Fano formula, scaled by the peak of the
    // Fano curve (the formula has an exact zero, so a pointwise ratio is
    // meaningless there).
    Tally t("fano_recovery", 1e-2);
    for (std::size_t k = 0; k < std::max<std::size_t>(1, draws / 4); ++k) {
      SystemParams p = rng();
      p.gamma = std::pow(10.0, rng.uniform(-2.0, 0.0));
      p.kappa = p.gamma * std::pow(10.0, rng.uniform(3.0, 4.0));
      p.g_abs = rng.uniform(0.0, 5.0) * std::sqrt(p.gamma * p.kappa);
      p.gamma_ph = 0.0;
      p.eta = 1.0;
      const auto dc = derive_couplings<double>(p);
      double dev = 0.0, peak = 0.0;
      for (double eps : linspace(-10.0, 10.0, 401)) {
        const SystemParams q = with_reduced_detuning(p, eps);
        const double f = fano_formula(dc.q, eps, p.gamma);
        dev = std::max(dev, std::abs(transition_rate_weak<double>(q) - f));
        peak = std::max(peak, f);
      }
      t.add(dev / peak, p);
    }
    out.push_back(t.result());
  }
  {
    Tally vieta("pole_vieta", 1e-10), oracle("pole_eigen_oracle", 1e-10), decay("pole_decay", 0.0);
    for (const auto& p : sample) {
      const auto poles = spectral_poles<double>(p);
      const auto m = regression_matrix<double>(p);
      const auto dc = derive_couplings<double>(p);
      const C sum = -C(dc.gamma_tot, dc.detuning);
      const double scale = std::max(std::abs(poles.gamma_plus), std::abs(poles.gamma_minus));
      double v = std::abs(poles.gamma_plus + poles.gamma_minus - sum) / std::abs(sum);
      v = std::max(v, std::abs(poles.gamma_plus * poles.gamma_minus - m.determinant()) / (scale * scale));
      v = std::max(v, std::abs(m.trace() - sum) / std::abs(sum));
      vieta.add(v, p);
      const Eigen::Vector2cd ev = Eigen::ComplexEigenSolver<Eigen::Matrix2cd>(m, false).eigenvalues();
      const double d1 = std::max(std::abs(ev(0) - poles.gamma_plus), std::abs(ev(1) - poles.gamma_minus));
      const double d2 = std::max(std::abs(ev(1) - poles.gamma_plus), std::abs(ev(0) - poles.gamma_minus));
      oracle.add(std::min(d1, d2) / scale, p);
      decay.add(std::max(poles.gamma_plus.real(), poles.gamma_minus.real()) < 0.0 ? 0.0 : 1.0, p);
    }
    out.push_back(vieta.result());
    out.push_back(oracle.result());
    out.push_back(decay.result());
  }
  {
    Tally sum("sum_rule", 1e-9), full("moments_coarse_vs_full", 1e-8), res("spectrum_resolvent", 1e-8),
        weight("spectrum_weights", 1e-9);
    RandomParams local(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t k = 0; k < draws; ++k) {
      const SystemParams p = detail::draw_decaying(local);
      const auto m = integrated_moments<double>(p);
      sum.add(std::abs(photon_sum(p, m) - 1.0), p);
      const auto f = integrated_moments_full(p);
      const double s = std::max({std::abs(m.i_e), std::abs(m.i_c), std::abs(m.i_p)});
      full.add(std::max({std::abs(m.i_e - f.i_e), std::abs(m.i_c - f.i_c), std::abs(m.i_p - f.i_p)}) / s, p);

      const double ds = local.uniform(1.0, 50.0);
      const auto sm = spectrum_model<double>(p, ds);
      double worst = 0.0, mag = 0.0;
      for (double nu : {0.0, p.detuning(), 0.5 * p.detuning() + 37.0, -250.0}) {
        for (Component c : kComponents) {
          const double a = sm.evaluate(c, nu);
          const double b = spectrum_component_resolvent<double>(p, m, nu, ds, c);
          const double pf = sm.evaluate_pole_form(c, nu);
          worst = std::max({worst, std::abs(a - b), std::abs(a - pf)});
          mag = std::max({mag, std::abs(a), std::abs(b)});
        }
      }
      res.add(mag > 0 ? worst / mag : worst, p);
      const double w = sm.weight(Component::tls) + sm.weight(Component::cavity) + sm.weight(Component::cross);
      weight.add(std::abs(w - sm.sum_rule), p);
    }
    out.push_back(sum.result());
    out.push_back(full.result());
    out.push_back(res.result());
    out.push_back(weight.result());
  }
  {
    Tally trace("generator_trace", 1e-12), vac("generator_vacuum", 0.0), herm("generator_hermiticity", 1e-12),
        coll("generator_collective_jump", 1e-12);
    for (auto p : sample) {
      const Operator3 r = detail::random_hermitian(rng);
      const Operator3 out_r = apply_lindblad(p, r);
      const double scale = p.gamma + p.kappa + p.gamma_ph + p.g_abs + std::abs(p.detuning());
      trace.add(std::abs(out_r.trace()) / scale, p);
      herm.add((out_r - out_r.adjoint()).cwiseAbs().maxCoeff() / scale, p);
      vac.add(apply_lindblad(p, OneExcitationDensityMatrix::vacuum().matrix()).cwiseAbs().maxCoeff(), p);

      p.eta = 1.0;
      const auto op = system_operators(p);
      const Operator3 l = std::sqrt(p.gamma) * op.sigma_minus +
                          std::polar(std::sqrt(p.kappa), p.theta21 - p.theta_c) * op.a;
      const Operator3 ll = l.adjoint() * l;
      const C i{0, 1};
      Operator3 ref = -i * (op.hamiltonian * r - r * op.hamiltonian) + l * r * l.adjoint() -
                      0.5 * (ll * r + r * ll);
      ref += 0.5 * p.gamma_ph * (op.sigma_z * r * op.sigma_z - r);
      coll.add((apply_lindblad(p, r) - ref).cwiseAbs().maxCoeff() / scale, p);
    }
    out.push_back(trace.result());
    out.push_back(vac.result());
    out.push_back(herm.result());
    out.push_back(coll.result());
  }
  {
    Tally agree("lindblad_vs_triple", 1e-6), book("photon_bookkeeping", 1e-6), psd("lindblad_positivity", 1e-9);
    const std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(draws, 12));
    for (std::size_t k = 0; k < n; ++k) {
      const SystemParams& p = sample[k];
      const auto w = transition_rate<double>(p);
      const double horizon = std::min(10.0 / w.value, 2000.0 / (p.gamma + p.kappa));
      const auto grid = linspace(0.0, horizon, 801);
      try {
        const auto tr = evolve_triple(p, BlochTriple{}, grid);
        double min_eig = 0.0;
        const auto tl = evolve_lindblad(p, OneExcitationDensityMatrix::excited(), grid, {},
                                        [&](double, const Operator3& rho) {
                                          min_eig = std::min(min_eig, OneExcitationDensityMatrix(rho).check().min_eigenvalue);
                                        });
        double d = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          d = std::max({d, std::abs(tr.states[i].n_e - tl.states[i].n_e),
                        std::abs(tr.states[i].n_c - tl.states[i].n_c),
                        std::abs(tr.states[i].pol - tl.states[i].pol)});
        }
        agree.add(d, p);
        psd.add(std::max(0.0, -min_eig), p);
      } catch (const std::exception& e) {
        agree.fail(e.what(), p);
      }

      // d/dt (n_e + n_c) by a five-point stencil against the emission rate.
      const Eigen::Matrix4d a = triple_generator(p);
      const double h = 0.01 / a.cwiseAbs().rowwise().sum().maxCoeff();
      const auto fine = linspace(0.0, 400.0 * h, 401);
      const auto tr = evolve_triple(p, BlochTriple{}, fine, EvolveOptions{Integrator::adaptive});
      double resid = 0.0, peak = 0.0;
      for (std::size_t i = 2; i + 2 < fine.size(); ++i) {
        auto total = [&](std::size_t j) { return tr.states[j].n_e + tr.states[j].n_c; };
        const double deriv = (total(i - 2) - 8 * total(i - 1) + 8 * total(i + 1) - total(i + 2)) / (12 * h);
        const double s = emission_intensity(p, tr.states[i]);
        resid = std::max(resid, std::abs(deriv + s));
        peak = std::max(peak, std::abs(s));
      }
      book.add(resid / peak, p);
    }
    out.push_back(agree.result());
    out.push_back(book.result());
    out.push_back(psd.result());
  }
  return out;
}

inline std::string format_report(const std::vector<CheckResult>& results) {
  std::string s;
  for (const auto& r : results) {
    s += r.passed ? "PASS " : "FAIL ";
    s += r.name;
    s += " cases=" + std::to_string(r.cases);
    s += " worst=" + format_number(r.worst);
    s += " tol=" + format_number(r.tolerance);
    if (!r.passed) s += " " + r.detail;
    s += '\n';
  }
  return s;
}

}  // namespace fanoqed
