#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fanoqed/ode.hpp"
#include "fanoqed/rates.hpp"

namespace fanoqed {
namespace {

using Vec2 = Eigen::Vector2d;

auto oscillator = [](double, const Vec2& y) { return Vec2(y[1], -y[0]); };

TEST(Ode, AdaptiveTracksHarmonicOscillator) {
  const auto times = linspace(0.0, 20.0, 41);
  std::vector<double> err;
  const auto stats = integrate_adaptive<Vec2>(
      oscillator, Vec2(1.0, 0.0), times,
      [&](std::size_t k, double t, const Vec2& y) {
        EXPECT_DOUBLE_EQ(t, times[k]);
        err.push_back(std::abs(y[0] - std::cos(t)) + std::abs(y[1] + std::sin(t)));
      });
  ASSERT_EQ(err.size(), times.size());
  for (double e : err) EXPECT_LT(e, 1e-8);
  EXPECT_GT(stats.accepted, 0u);
}

TEST(Ode, AdaptiveHandlesStiffDecay) {
  using Vec1 = Eigen::Matrix<double, 1, 1>;
  const std::vector<double> times{0.0, 1.0};
  double last = 0.0;
  integrate_adaptive<Vec1>([](double, const Vec1& y) { return Vec1(-50.0 * y[0]); }, Vec1(1.0), times,
                           [&](std::size_t, double, const Vec1& y) { last = y[0]; });
  EXPECT_NEAR(last, std::exp(-50.0), 1e-12);
}

TEST(Ode, AdaptiveReportsExhaustedBudget) {
  AdaptiveOptions opt;
  opt.max_steps = 10;
  const std::vector<double> times{0.0, 1000.0};
  try {
    integrate_adaptive<Vec2>(oscillator, Vec2(1.0, 0.0), times, [](std::size_t, double, const Vec2&) {}, opt);
    FAIL() << "expected integration_error";
  } catch (const integration_error& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 1000.0);
  }
}

TEST(Ode, FixedStepIsFourthOrder) {
  auto final_error = [](double h) {
    const std::vector<double> times{0.0, 5.0};
    double e = 0.0;
    integrate_fixed<Vec2>(oscillator, Vec2(1.0, 0.0), times,
                          [&](std::size_t k, double t, const Vec2& y) {
                            if (k == 1) e = std::abs(y[0] - std::cos(t));
                          },
                          h);
    return e;
  };
  const double ratio = final_error(0.1) / final_error(0.05);
  EXPECT_NEAR(ratio, 16.0, 1.5);
}

TEST(Ode, FixedStepIsDeterministic) {
  const auto times = linspace(0.0, 3.0, 7);
  std::vector<double> a, b;
  integrate_fixed<Vec2>(oscillator, Vec2(1.0, 0.0), times,
                        [&](std::size_t, double, const Vec2& y) { a.push_back(y[0]); }, 0.013);
  integrate_fixed<Vec2>(oscillator, Vec2(1.0, 0.0), times,
                        [&](std::size_t, double, const Vec2& y) { b.push_back(y[0]); }, 0.013);
  EXPECT_EQ(a, b);
  EXPECT_THROW(integrate_fixed<Vec2>(oscillator, Vec2(1.0, 0.0), times,
                                     [](std::size_t, double, const Vec2&) {}, 0.0),
               parameter_error);
}

TEST(Ode, ComplexStateVector) {
  using VecC = Eigen::Matrix<std::complex<double>, 1, 1>;
  const std::complex<double> rate(-0.5, 3.0);
  const std::vector<double> times{0.0, 2.0};
  std::complex<double> last;
  integrate_adaptive<VecC>([&](double, const VecC& y) { return VecC(rate * y[0]); }, VecC(1.0), times,
                           [&](std::size_t, double, const VecC& y) { last = y[0]; });
  EXPECT_LT(std::abs(last - std::exp(rate * 2.0)), 1e-9);
}

}  // namespace
}  // namespace fanoqed
