#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fanoqed/config.hpp"
#include "fanoqed/csv.hpp"
#include "fanoqed/dynamics.hpp"
#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/rates.hpp"
#include "fanoqed/spectra.hpp"
#include "fanoqed/sweep.hpp"
#include "fanoqed/validate.hpp"

namespace fanoqed {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfigError = 2,
  kExitNumericError = 3,
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::string text;  // written to the output target only when exit_code is 0 or 1
};

namespace detail {

inline void write_header(CsvDocument& doc, const RunConfig& cfg) {
  doc.meta("command", cfg.command);
  doc.meta("seed", std::to_string(cfg.seed));
  doc.meta("energy_unit", "ueV");
  doc.meta("time_unit_ps", kTimeUnitPicoseconds);
  doc.params(cfg.params);
}

}  // namespace detail

inline CommandOutput cmd_rate_sweep(const RunConfig& cfg) {
  validate(cfg.params);
  const auto& s = cfg.sweep;
  if (s.count == 0) throw config_error("sweep.count must be at least 1");
  std::vector<double> xs = linspace(s.from, s.to, s.count);
  if (s.variable == "detuning")
    for (double& x : xs) x = 2.0 * x / cfg.params.kappa;  // omega21 - omega_c -> eps

  std::vector<RateRow> rows(xs.size());
  parallel_for(xs.size(), cfg.workers, [&](std::size_t i) { rows[i] = rate_row(cfg.params, xs[i]); });

  CsvDocument doc;
  detail::write_header(doc, cfg);
  doc.meta("sweep_variable", s.variable);
  doc.meta("detuning_ueV", "omega21 - omega_c");
  const auto dc = derive_couplings<double>(cfg.params);
  doc.meta("q_real", dc.q.real());
  doc.meta("q_imag", dc.q.imag());
  std::size_t violations = 0;
  for (const auto& r : rows) violations += r.regime_violation ? 1 : 0;
  if (violations) doc.meta("regime_violation", "kappa < gamma; W_full is -lambda_minus");
  doc.header({"eps", "detuning_ueV", "W_full", "W_weak", "W_fano_abs"});
  for (const auto& r : rows) doc.row({r.eps, r.tls_minus_cavity, r.w_full, r.w_weak, r.w_fano});
  return {kExitOk, doc.str()};
}

inline CommandOutput cmd_dynamics(const RunConfig& cfg) {
  const SystemParams& p = cfg.params;
  validate(p);
  if (cfg.dynamics.count < 2) throw config_error("dynamics.count must be at least 2");
  const double w = transition_rate<double>(p).value;
  double t_end = cfg.dynamics.t_end;
  if (t_end <= 0.0) {
    if (!(w > 0.0)) throw config_error("dynamics.tEnd is required when W = 0");
    t_end = 10.0 / w;
  }
  const auto grid = linspace(0.0, t_end, cfg.dynamics.count);

  EvolveOptions opt;
  if (cfg.fixed_step) {
    const Eigen::Matrix4d a = triple_generator(p);
    opt.method = detail::estimated_rk_steps(a, t_end) > opt.max_estimated_steps ? Integrator::exponential
                                                                               : Integrator::fixed_step;
  }
  const Trajectory traj = evolve_triple(p, BlochTriple{}, grid, opt);
  const auto rs = rate_coefficients<double>(p);

  CsvDocument doc;
  detail::write_header(doc, cfg);
  doc.meta("integrator", to_string(traj.method));
  if (traj.method == Integrator::adaptive) {
    doc.meta("rtol", traj.rtol);
    doc.meta("atol", traj.atol);
  }
  if (traj.method == Integrator::fixed_step) doc.meta("step", traj.step);
  doc.meta("W", w);
  doc.meta("eps", reduced_detuning(p));
  doc.header({"t", "n_e_ode", "n_c_ode", "n_e_coarse", "n_c_coarse", "exp_minus_Wt"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = coarse_grained_solution(rs, grid[i]);
    const auto& s = traj.states[i];
    doc.row({grid[i], s.n_e, s.n_c, c.n_e, c.n_c, std::exp(-w * grid[i])});
  }
  return {kExitOk, doc.str()};
}

namespace detail {

inline std::vector<double> spectrum_grid(const RunConfig& cfg) {
  const auto& s = cfg.spectrum;
  if (s.count < 2) throw config_error("spectrum.count must be at least 2");
  if (s.grid == "default") return default_frequency_grid(cfg.params, s.ds, s.count);
  if (!(s.nu_max > s.nu_min)) throw config_error("spectrum.nuMax must exceed spectrum.nuMin");
  return linspace(s.nu_min, s.nu_max, s.count);
}

inline MomentSource moment_source(const RunConfig& cfg) {
  return cfg.spectrum.moments == "ode" ? MomentSource::full_ode : MomentSource::coarse_grained;
}

}  // namespace detail

inline CommandOutput cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  validate(cfg.params);
  const auto grid = detail::spectrum_grid(cfg);
  const double ds = cfg.spectrum.ds;
  if (!grid_margin_ok(cfg.params, grid, ds))
    log << "warning: frequency grid reaches less than 10 max(kappa, ds, |g|) beyond the "
           "resonances; tails are truncated\n";
  const auto sp = total_spectrum<long double>(cfg.params, grid, ds, detail::moment_source(cfg));

  CsvDocument doc;
  detail::write_header(doc, cfg);
  doc.meta("ds", ds);
  doc.meta("moments", cfg.spectrum.moments);
  doc.meta("W", transition_rate<long double>(cfg.params).value);
  doc.header({"nu_minus_omega21_ueV", "S21", "Sc", "SF", "Stotal"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    doc.row({sp.nu[i], sp.s21[i], sp.s_c[i], sp.s_f[i], sp.total[i]});
  doc.meta("gridIntegral", trapezoid(sp.nu, sp.total));
  doc.meta("sumRule", sp.sum_rule);
  return {kExitOk, doc.str()};
}

inline CommandOutput cmd_spectrum_map(const RunConfig& cfg, std::ostream& log) {
  validate(cfg.params);
  const auto& m = cfg.map;
  if (m.detuning_count == 0 || m.nu_count < 2) throw config_error("map counts are too small");
  const auto detunings = linspace(m.detuning_min, m.detuning_max, m.detuning_count);
  const auto nu = linspace(m.nu_min, m.nu_max, m.nu_count);
  const double ds = cfg.spectrum.ds;

  struct Slice {
    bool gap = false;
    std::string reason;
    double w = 0.0, sum_rule = 0.0;
    std::vector<double> total;
  };
  std::vector<Slice> slices(detunings.size());
  parallel_for(detunings.size(), cfg.workers, [&](std::size_t i) {
    const SystemParams p = with_tls_cavity_offset(cfg.params, detunings[i]);
    Slice& s = slices[i];
    const auto rs = rate_coefficients<long double>(p);
    s.w = static_cast<double>(-rs.lambda_plus);
    if (std::abs(rs.lambda_plus) < 1e-9L * p.kappa) {
      s.gap = true;
      s.reason = "|lambda_+| below 1e-9 kappa";
      return;
    }
    try {
      const auto sp = total_spectrum<long double>(p, nu, ds, detail::moment_source(cfg));
      s.total = sp.total;
      s.sum_rule = sp.sum_rule;
    } catch (const divergent_moment_error& e) {
      s.gap = true;
      s.reason = e.what();
    }
  });

  CsvDocument doc;
  detail::write_header(doc, cfg);
  doc.meta("ds", ds);
  doc.meta("detuning_ueV", "omega21 - omega_c");
  std::size_t gaps = 0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].gap) {
      ++gaps;
      doc.meta("gap", format_number(detunings[i]) + " " + slices[i].reason);
      log << "warning: no spectrum at detuning " << format_number(detunings[i]) << " ueV ("
          << slices[i].reason << ")\n";
    } else {
      doc.meta("slice", format_number(detunings[i]) + " W=" + format_number(slices[i].w) +
                            " sumRule=" + format_number(slices[i].sum_rule));
    }
  }
  doc.meta("gaps", std::to_string(gaps));
  doc.header({"detuning_ueV", "nu_minus_omega21_ueV", "Stotal"});
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].gap) continue;
    for (std::size_t k = 0; k < nu.size(); ++k) doc.row({detunings[i], nu[k], slices[i].total[k]});
  }
  return {kExitOk, doc.str()};
}

inline CommandOutput cmd_validate(const RunConfig& cfg) {
  const auto results = run_validation(cfg.params, cfg.seed, cfg.validate.draws);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  std::string text = "# seed," + std::to_string(cfg.seed) + "\n" + format_report(results);
  text += ok ? "RESULT PASS\n" : "RESULT FAIL\n";
  return {ok ? kExitOk : kExitValidationFailed, text};
}

/// Runs cfg.command. Errors are mapped to exit codes and described on `log`;
/// the returned text is empty unless the command produced a result.
inline CommandOutput run_command(const RunConfig& cfg, std::ostream& log) {
  try {
    if (cfg.command == "rate-sweep") return cmd_rate_sweep(cfg);
    if (cfg.command == "dynamics") return cmd_dynamics(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, log);
    if (cfg.command == "spectrum-map") return cmd_spectrum_map(cfg, log);
    if (cfg.command == "validate") return cmd_validate(cfg);
    log << "error: unknown command '" << cfg.command << "'\n";
    return {kExitConfigError, {}};
  } catch (const config_error& e) {
    log << "error: " << e.what() << '\n';
    return {kExitConfigError, {}};
  } catch (const parameter_error& e) {
    log << "error: invalid parameters: " << e.what() << '\n';
    return {kExitConfigError, {}};
  } catch (const integration_error& e) {
    log << "error: integration failed at t = " << format_number(e.time()) << ": " << e.what() << '\n';
    return {kExitNumericError, {}};
  } catch (const divergent_moment_error& e) {
    log << "error: " << e.what() << '\n';
    return {kExitNumericError, {}};
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return {kExitNumericError, {}};
  }
}

/// Writes `text` to `path` ("" or "-" means stdout).
inline bool write_output(const std::string& path, const std::string& text, std::ostream& log) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    log << "error: cannot open output file '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

}  // namespace fanoqed
