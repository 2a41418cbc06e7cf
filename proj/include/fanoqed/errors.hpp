#pragma once

#include <stdexcept>
#include <string>

namespace fanoqed {

// Invalid physical input (eta outside [0,1], non-positive decay rates, ...).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive integration could not proceed; carries the time at which the
// step size collapsed.
class integration_error : public std::runtime_error {
 public:
  integration_error(const std::string& what, double t)
      : std::runtime_error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

// The coarse-grained solution does not decay (Lambda_+ >= 0), so the time
// integrals of n_e, n_c and p diverge.
class divergent_moment_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A density matrix left the physical cone beyond tolerance.
class positivity_error : public std::runtime_error {
 public:
  positivity_error(const std::string& what, double t, double min_eigenvalue)
      : std::runtime_error(what), t_(t), min_eig_(min_eigenvalue) {}
  double time() const noexcept { return t_; }
  double min_eigenvalue() const noexcept { return min_eig_; }

 private:
  double t_;
  double min_eig_;
};

class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved_error) + ")"),
        achieved_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class envelope_error : public std::runtime_error {
 public:
  enum class kind { too_few_extrema, fit_failure };
  envelope_error(kind k, const std::string& what)
      : std::runtime_error(what), kind_(k) {}
  kind reason() const noexcept { return kind_; }

 private:
  kind kind_;
};

}  // namespace fanoqed
