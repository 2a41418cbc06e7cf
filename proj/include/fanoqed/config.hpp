#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fanoqed/params.hpp"

namespace fanoqed {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string variable = "eps";  // "eps" or "detuning" (omega21 - omega_c, ueV)
  double from = -10.0;
  double to = 10.0;
  std::size_t count = 401;
  bool operator==(const SweepSpec&) const = default;
};

struct SpectrumSpec {
  double ds = 20.0;
  std::string grid = "default";  // "default" or "range"
  double nu_min = -1000.0;       // used when grid == "range"
  double nu_max = 1000.0;
  std::size_t count = 2001;
  std::string moments = "coarse";  // "coarse" or "ode"
  bool operator==(const SpectrumSpec&) const = default;
};

struct DynamicsSpec {
  double t_end = 0.0;  // 0 means 10 / W
  std::size_t count = 2001;
  bool operator==(const DynamicsSpec&) const = default;
};

struct MapSpec {
  double detuning_min = -4000.0;  // omega21 - omega_c, ueV
  double detuning_max = 4000.0;
  std::size_t detuning_count = 161;
  double nu_min = -5000.0;
  double nu_max = 5000.0;
  std::size_t nu_count = 1601;
  bool operator==(const MapSpec&) const = default;
};

struct ValidateSpec {
  std::size_t draws = 200;
  bool operator==(const ValidateSpec&) const = default;
};

struct RunConfig {
  std::string command;
  std::string output;  // empty or "-" writes to stdout
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool fixed_step = false;
  SystemParams params{};
  SweepSpec sweep{};
  SpectrumSpec spectrum{};
  DynamicsSpec dynamics{};
  MapSpec map{};
  ValidateSpec validate{};
  bool operator==(const RunConfig&) const = default;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, const std::string& where,
                           std::initializer_list<const char*> known) {
  if (!j.is_object()) throw config_error(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(where + "." + key + ": " + e.what());
  }
}

inline void read_count(const json& j, const char* key, std::size_t& out, const std::string& where) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw config_error(where + "." + key + " must be a non-negative integer");
  out = v.get<std::size_t>();
}

}  // namespace detail

inline nlohmann::json to_json(const SystemParams& p) {
  return {{"omega21", p.omega21}, {"omegaC", p.omega_c},   {"gAbs", p.g_abs},
          {"phi", p.phi},         {"gamma", p.gamma},      {"kappa", p.kappa},
          {"gammaPh", p.gamma_ph}, {"eta", p.eta},         {"theta21", p.theta21},
          {"thetaC", p.theta_c}};
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["fixedStep"] = c.fixed_step;
  j["params"] = to_json(c.params);
  j["sweep"] = {{"variable", c.sweep.variable},
                {"from", c.sweep.from},
                {"to", c.sweep.to},
                {"count", c.sweep.count}};
  j["spectrum"] = {{"ds", c.spectrum.ds},         {"grid", c.spectrum.grid},
                   {"nuMin", c.spectrum.nu_min},  {"nuMax", c.spectrum.nu_max},
                   {"count", c.spectrum.count},   {"moments", c.spectrum.moments}};
  j["dynamics"] = {{"tEnd", c.dynamics.t_end}, {"count", c.dynamics.count}};
  j["map"] = {{"detuningMin", c.map.detuning_min}, {"detuningMax", c.map.detuning_max},
              {"detuningCount", c.map.detuning_count}, {"nuMin", c.map.nu_min},
              {"nuMax", c.map.nu_max},              {"nuCount", c.map.nu_count}};
  j["validate"] = {{"draws", c.validate.draws}};
  return j;
}

inline SystemParams params_from_json(const nlohmann::json& j) {
  using detail::read;
  detail::reject_unknown(j, "params",
                         {"omega21", "omegaC", "gAbs", "phi", "gamma", "kappa", "gammaPh", "eta",
                          "theta21", "thetaC"});
  SystemParams p;
  read(j, "omega21", p.omega21, "params");
  read(j, "omegaC", p.omega_c, "params");
  read(j, "gAbs", p.g_abs, "params");
  read(j, "phi", p.phi, "params");
  read(j, "gamma", p.gamma, "params");
  read(j, "kappa", p.kappa, "params");
  read(j, "gammaPh", p.gamma_ph, "params");
  read(j, "eta", p.eta, "params");
  read(j, "theta21", p.theta21, "params");
  read(j, "thetaC", p.theta_c, "params");
  return p;
}

/// Parses a run configuration. Missing keys keep their defaults; unknown keys
/// are errors. Physical validity of the parameters is checked by the
/// commands, not here.
inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::read;
  using detail::read_count;
  detail::reject_unknown(j, "config",
                         {"command", "output", "seed", "workers", "fixedStep", "params", "sweep",
                          "spectrum", "dynamics", "map", "validate"});
  RunConfig c;
  read(j, "command", c.command, "config");
  read(j, "output", c.output, "config");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw config_error("config.seed must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    std::size_t w = 0;
    read_count(j, "workers", w, "config");
    c.workers = static_cast<unsigned>(w);
  }
  read(j, "fixedStep", c.fixed_step, "config");
  if (j.contains("params")) c.params = params_from_json(j.at("params"));

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::reject_unknown(s, "sweep", {"variable", "from", "to", "count"});
    read(s, "variable", c.sweep.variable, "sweep");
    read(s, "from", c.sweep.from, "sweep");
    read(s, "to", c.sweep.to, "sweep");
    read_count(s, "count", c.sweep.count, "sweep");
  }
  if (j.contains("spectrum")) {
    const auto& s = j.at("spectrum");
    detail::reject_unknown(s, "spectrum", {"ds", "grid", "nuMin", "nuMax", "count", "moments"});
    read(s, "ds", c.spectrum.ds, "spectrum");
    read(s, "grid", c.spectrum.grid, "spectrum");
    read(s, "nuMin", c.spectrum.nu_min, "spectrum");
    read(s, "nuMax", c.spectrum.nu_max, "spectrum");
    read_count(s, "count", c.spectrum.count, "spectrum");
    read(s, "moments", c.spectrum.moments, "spectrum");
  }
  if (j.contains("dynamics")) {
    const auto& s = j.at("dynamics");
    detail::reject_unknown(s, "dynamics", {"tEnd", "count"});
    read(s, "tEnd", c.dynamics.t_end, "dynamics");
    read_count(s, "count", c.dynamics.count, "dynamics");
  }
  if (j.contains("map")) {
    const auto& s = j.at("map");
    detail::reject_unknown(s, "map",
                           {"detuningMin", "detuningMax", "detuningCount", "nuMin", "nuMax", "nuCount"});
    read(s, "detuningMin", c.map.detuning_min, "map");
    read(s, "detuningMax", c.map.detuning_max, "map");
    read_count(s, "detuningCount", c.map.detuning_count, "map");
    read(s, "nuMin", c.map.nu_min, "map");
    read(s, "nuMax", c.map.nu_max, "map");
    read_count(s, "nuCount", c.map.nu_count, "map");
  }
  if (j.contains("validate")) {
    const auto& s = j.at("validate");
    detail::reject_unknown(s, "validate", {"draws"});
    read_count(s, "draws", c.validate.draws, "validate");
  }

  if (c.sweep.variable != "eps" && c.sweep.variable != "detuning")
    throw config_error("sweep.variable must be \"eps\" or \"detuning\"");
  if (c.spectrum.grid != "default" && c.spectrum.grid != "range")
    throw config_error("spectrum.grid must be \"default\" or \"range\"");
  if (c.spectrum.moments != "coarse" && c.spectrum.moments != "ode")
    throw config_error("spectrum.moments must be \"coarse\" or \"ode\"");
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace fanoqed
