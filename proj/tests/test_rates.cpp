#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fanoqed/random_params.hpp"
#include "fanoqed/rates.hpp"
#include "support/fixtures.hpp"

namespace fanoqed {
namespace {

using testing::reference;

SystemParams antiresonant() {
  SystemParams p = reference();
  p.g_abs = 0.0;
  p.eta = 1.0;
  p.gamma_ph = 0.0;
  return p;
}

TEST(Rates, ZeroOverlapResonantRatesAreEqual) {
  SystemParams p = reference();
  p.eta = 0.0;
  const auto rs = rate_coefficients<double>(p);
  const double expected = 2.0 * p.g_abs * p.g_abs / derive_couplings<double>(p).gamma_tot;
  for (double r : {rs.r_pp, rs.r_pm, rs.r_mp, rs.r_mm}) EXPECT_NEAR(r, expected, 1e-12 * expected);
}

TEST(Rates, AntiresonanceHasZeroDeterminant) {
  const SystemParams p = antiresonant();
  const auto rs = rate_coefficients<double>(p);
  const double x = p.gamma * p.kappa / (p.gamma + p.kappa);
  EXPECT_NEAR(rs.r_pm, -x, 1e-14);
  EXPECT_NEAR(rs.r_mp, -x, 1e-14);
  EXPECT_NEAR(rs.r_pp, x, 1e-14);
  EXPECT_NEAR(rs.r_mm, x, 1e-14);
  EXPECT_NEAR(rs.det, 0.0, 1e-14);
  EXPECT_NEAR(rs.lambda_plus, 0.0, 1e-14);

  Eigen::Matrix2d a;
  a << -(rs.r_pm + p.kappa), rs.r_pp, rs.r_mm, -(rs.r_mp + p.gamma);
  EXPECT_NEAR(a.determinant(), 0.0, 1e-12);
  EXPECT_LE(std::abs(transition_rate<double>(p).value), 1e-12 * p.kappa);
}

TEST(Rates, EigenvaluesMatchGeneralSolver) {
  RandomParams rng(11);
  for (int k = 0; k < 500; ++k) {
    const SystemParams p = rng();
    const auto rs = rate_coefficients<double>(p);
    Eigen::Matrix2d a;
    a << -(rs.r_pm + p.kappa), rs.r_pp, rs.r_mm, -(rs.r_mp + p.gamma);
    const Eigen::Vector2cd ev = Eigen::EigenSolver<Eigen::Matrix2d>(a, false).eigenvalues();
    ASSERT_NEAR(ev(0).imag(), 0.0, 1e-9 * a.norm());
    const double hi = std::max(ev(0).real(), ev(1).real());
    const double lo = std::min(ev(0).real(), ev(1).real());
    const double scale = std::max(std::abs(rs.lambda_plus), std::abs(rs.lambda_minus));
    EXPECT_NEAR(rs.lambda_plus, hi, 1e-10 * scale);
    EXPECT_NEAR(rs.lambda_minus, lo, 1e-10 * scale);
    EXPECT_GE(rs.lambda_plus, rs.lambda_minus);
    EXPECT_NEAR(rs.lambda_plus + rs.lambda_minus, rs.trace(), 1e-10 * std::abs(rs.trace()));
  }
}

TEST(Rates, FarDetunedRateApproachesBareDecay) {
  for (double eps : {-1e6, 1e6}) {
    const SystemParams p = with_reduced_detuning(reference(), eps);
    EXPECT_NEAR(transition_rate<double>(p).value, p.gamma, 1e-3 * p.gamma);
  }
}

TEST(Rates, RegimeViolationIsSurfaced) {
  SystemParams p = reference();
  p.kappa = 0.01;
  const auto w = transition_rate<double>(p);
  EXPECT_TRUE(w.regime_violation);
  EXPECT_EQ(w.value, -rate_coefficients<double>(p).lambda_minus);
  EXPECT_FALSE(transition_rate<double>(reference()).regime_violation);
}

TEST(Rates, WeakCouplingRecoversPurcell) {
  SystemParams p = reference();
  p.eta = 0.0;
  for (double eps : linspace(-10, 10, 401)) {
    const SystemParams q = with_reduced_detuning(p, eps);
    const double pr = purcell_rate<double>(q);
    EXPECT_NEAR(transition_rate_weak<double>(q), pr, 1e-12 * pr);
  }
  SystemParams bare = testing::decoupled();
  EXPECT_DOUBLE_EQ(transition_rate_weak<double>(bare), bare.gamma);
}

TEST(Rates, WeakCouplingRecoversFanoShape) {
  // Normalized by the Fano peak (1 + |q|^2) gamma, since the formula has an
  // exact zero at eps = -q where any ratio blows up.
  const SystemParams p = testing::weak_fano();
  const auto q = derive_couplings<double>(p).q;
  const double peak = fano_formula(q, 1.0 / q.real(), p.gamma);
  double worst = 0.0;
  for (const auto& r : rate_sweep(p, -10, 10, 401))
    worst = std::max(worst, std::abs(r.w_weak - r.w_fano) / peak);
  EXPECT_LE(worst, 1e-2);
}

TEST(Rates, FanoRecoveryImprovesWithCavityWidth) {
  SystemParams p = testing::weak_fano();
  double previous = 1.0;
  for (double kappa : {50.0, 500.0, 5000.0}) {
    p.kappa = kappa;
    p.g_abs = 1.5 * std::sqrt(p.gamma * kappa);
    const auto q = derive_couplings<double>(p).q;
    const double peak = fano_formula(q, 1.0 / q.real(), p.gamma);
    double worst = 0.0;
    for (const auto& r : rate_sweep(p, -10, 10, 401))
      worst = std::max(worst, std::abs(r.w_weak - r.w_fano) / peak);
    EXPECT_LT(worst, previous);
    previous = worst;
  }
}

TEST(Rates, FanoFormula) {
  const double gamma = 0.05;
  EXPECT_NEAR(fano_formula(3.0, 0.0, gamma), 9 * gamma, 1e-15);
  EXPECT_NEAR(fano_formula(3.0, -3.0, gamma), 0.0, 1e-15);
  EXPECT_NEAR(fano_formula(3.0, 1.0 / 3.0, gamma), 10 * gamma, 1e-14);
  for (double eps : linspace(-10, 10, 201)) EXPECT_LE(fano_formula(3.0, eps, gamma), 10 * gamma + 1e-14);
  EXPECT_THROW(fano_formula(3.0, 0.0, 0.0), parameter_error);
}

TEST(Rates, ZeroOverlapProfileIsSymmetric) {
  SystemParams p = reference();
  p.eta = 0.0;
  for (double eps : linspace(0, 20, 201)) {
    const double a = transition_rate<double>(with_reduced_detuning(p, eps));
    const double b = transition_rate<double>(with_reduced_detuning(p, -eps));
    EXPECT_NEAR(a, b, 1e-10 * a);
  }
}

TEST(Rates, FullOverlapProfileIsAsymmetric) {
  const auto rows = rate_sweep(reference(), -10, 10, 401);
  const auto it = std::min_element(rows.begin(), rows.end(),
                                   [](const RateRow& a, const RateRow& b) { return a.w_full < b.w_full; });
  EXPECT_LT(it->eps, 0.0);
}

TEST(Rates, SweepEdgeCases) {
  const auto rows = rate_sweep(reference(), 0.0, 0.0, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].w_full, rows[1].w_full);
  EXPECT_EQ(rows[0].w_fano, rows[1].w_fano);
  EXPECT_THROW(rate_sweep(reference(), 0.0, 1.0, 1), parameter_error);
  EXPECT_EQ(linspace(1.0, 2.0, 1).size(), 1u);
  EXPECT_TRUE(linspace(1.0, 2.0, 0).empty());
}

TEST(Rates, SweepReportsDetuningInMicroeV) {
  const auto rows = rate_sweep(reference(), -2.0, 2.0, 5);
  EXPECT_DOUBLE_EQ(rows.front().tls_minus_cavity, -50.0);
  EXPECT_DOUBLE_EQ(rows.back().tls_minus_cavity, 50.0);
}

TEST(Rates, WideningPrecisionLeavesRateUnchanged) {
  const SystemParams p = with_reduced_detuning(reference(), -3.0);
  const double w = transition_rate<double>(p);
  const long double wl = transition_rate<long double>(p);
  EXPECT_NEAR(w, static_cast<double>(wl), 1e-12 * w);
}

}  // namespace
}  // namespace fanoqed
