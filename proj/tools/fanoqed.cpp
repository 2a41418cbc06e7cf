#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fanoqed/commands.hpp"
#include "fanoqed/config.hpp"

int main(int argc, char** argv) {
  using namespace fanoqed;

  CLI::App app{"Fano-effect cavity QED rates, dynamics and spectra"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  bool fixed_step = false;
  bool print_config = false;

  const char* names[] = {"rate-sweep", "dynamics", "spectrum", "spectrum-map", "validate"};
  const char* help[] = {
      "transition rate W against reduced detuning",
      "population dynamics: ODE, coarse-grained and exp(-Wt)",
      "emission spectrum components and sum rule",
      "total spectrum over a detuning sweep",
      "run the invariant and oracle checks",
  };
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", out_path, "output file, '-' for stdout");
    auto* w = sub->add_option("--workers", workers, "worker threads, 0 = all cores");
    auto* s = sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_flag("--fixed-step", fixed_step, "fixed-step integration for reproducible output");
    sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
    // The option objects are per subcommand; remember the ones that were used.
    sub->callback([&, o, w, s] {
      if (o->count()) out_opt = o;
      if (w->count()) workers_opt = w;
      if (s->count()) seed_opt = s;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (!cfg.command.empty() && cfg.command != command)
    std::cerr << "note: config names command '" << cfg.command << "', running '" << command << "'\n";
  cfg.command = command;
  if (out_opt) cfg.output = out_path;
  if (workers_opt) cfg.workers = workers;
  if (seed_opt) cfg.seed = seed;
  if (fixed_step) cfg.fixed_step = true;

  if (print_config) {
    std::cout << dump_config(cfg);
    return kExitOk;
  }

  const CommandOutput result = run_command(cfg, std::cerr);
  if (result.exit_code == kExitOk || result.exit_code == kExitValidationFailed) {
    if (!write_output(cfg.output, result.text, std::cerr)) return kExitConfigError;
  }
  return result.exit_code;
}
