#pragma once

#include <cstdio>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fanoqed/params.hpp"

namespace fanoqed {

/// 17 significant digits, '.' as decimal separator regardless of locale.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (char* c = buf; *c; ++c)
    if (*c == ',') *c = '.';
  return buf;
}

/// Builds a CSV document in memory: "# key,value" metadata lines, one header
/// row, comma-separated data rows, LF line endings.
class CsvDocument {
 public:
  void meta(std::string_view key, std::string_view value) {
    text_ += "# ";
    text_ += key;
    text_ += ',';
    text_ += value;
    text_ += '\n';
  }
  void meta(std::string_view key, double value) { meta(key, format_number(value)); }

  void params(const SystemParams& p) {
    meta("omega21", p.omega21);
    meta("omegaC", p.omega_c);
    meta("gAbs", p.g_abs);
    meta("phi", p.phi);
    meta("gamma", p.gamma);
    meta("kappa", p.kappa);
    meta("gammaPh", p.gamma_ph);
    meta("eta", p.eta);
    meta("theta21", p.theta21);
    meta("thetaC", p.theta_c);
  }

  void header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }

  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

  void row(std::span<const double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_number(v);
      first = false;
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace fanoqed
