#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fanoqed/spectra.hpp"
#include "fanoqed/spectrum_oracle.hpp"
#include "support/fixtures.hpp"

namespace fanoqed {
namespace {

using testing::reference;

TEST(SpectrumOracle, MomentsMatchClosedForm) {
  SystemParams p = with_tls_cavity_offset(reference(), -1000.0);
  p.gamma_ph = 3.0;
  const SpectrumOracle oracle(p, 20.0);
  const auto m = integrated_moments<double>(p);
  const auto& r = oracle.moment_matrix();
  EXPECT_NEAR(r(0, 0).real(), m.i_e, 1e-9 * m.i_e);
  EXPECT_NEAR(r(1, 1).real(), m.i_c, 1e-9 * m.i_e);
  EXPECT_LT(std::abs(r(0, 1) - m.i_p), 1e-9 * m.i_e);
  EXPECT_LT(std::abs(r(1, 0) - std::conj(m.i_p)), 1e-9 * m.i_e);
}

TEST(SpectrumOracle, BareEmitterLine) {
  const SystemParams p = testing::decoupled();
  const SpectrumOracle oracle(p, 20.0);
  const auto grid = linspace(-3000, 3000, 3001);
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = oracle.total(grid[i]);
  const double hw = p.gamma / 2 + 10.0;
  const double tails = 2.0 / std::numbers::pi * std::atan(hw / 3000.0);
  EXPECT_NEAR(trapezoid(grid, s) + tails, 1.0, 1e-3);
  EXPECT_NEAR(oracle.total(0.0), 1.0 / (std::numbers::pi * hw), 1e-4 / hw);
}

TEST(SpectrumOracle, MatchesClosedForm) {
  for (double gph : {0.0, 30.0}) {
    SystemParams p = with_tls_cavity_offset(reference(), testing::kFarDetuning);
    p.gamma_ph = gph;
    const auto grid = linspace(-800, 4200, 126);
    const auto closed = total_spectrum<double>(p, grid, 20.0);
    const auto brute = oracle_spectrum(p, grid, 20.0);
    EXPECT_LT(testing::relative_l2(brute, closed.total), 1e-3) << "gamma_ph=" << gph;
  }
}

TEST(SpectrumOracle, ComponentsMatchClosedForm) {
  const SystemParams p = reference();
  const SpectrumOracle oracle(p, 20.0);
  const auto sm = spectrum_model<double>(p, 20.0);
  for (double nu : {-120.0, -60.0, 0.0, 80.0}) {
    const double scale = sm.evaluate_total(nu) + sm.evaluate(Component::cavity, nu);
    for (Component c : kComponents) {
      double err = 0.0;
      const double v = oracle.component(c, nu, &err);
      EXPECT_NEAR(v, sm.evaluate(c, nu), 2e-3 * scale) << to_string(c) << " nu=" << nu;
      EXPECT_GE(err, 0.0);
    }
  }
}

TEST(SpectrumOracle, GridIntegralIsOnePhoton) {
  SystemParams p = with_tls_cavity_offset(reference(), 1000.0);
  p.gamma_ph = 3.0;
  const auto grid = linspace(-25000, 25000, 5001);
  const auto s = oracle_spectrum(p, grid, 20.0);
  EXPECT_NEAR(trapezoid(grid, s), 1.0, 5e-3);
}

TEST(SpectrumOracle, DivergentMomentsAreRejected) {
  SystemParams p = reference();
  p.g_abs = 0.0;
  EXPECT_THROW(SpectrumOracle(p, 20.0), divergent_moment_error);
  EXPECT_THROW(SpectrumOracle(reference(), 0.0), parameter_error);
}

TEST(SpectrumOracle, ParallelMatchesSerial) {
  const SystemParams p = with_tls_cavity_offset(reference(), 500.0);
  const auto grid = linspace(-300, 900, 25);
  EXPECT_EQ(oracle_spectrum(p, grid, 20.0, 1), oracle_spectrum(p, grid, 20.0, 4));
}

}  // namespace
}  // namespace fanoqed
