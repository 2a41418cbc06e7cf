#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fanoqed/validate.hpp"

namespace fanoqed {
namespace {

std::vector<std::string> passed_names(const std::vector<CheckResult>& r) {
  std::vector<std::string> out;
  for (const auto& c : r)
    if (c.passed) out.push_back(c.name);
  return out;
}

TEST(Validate, DefaultSeedPasses) {
  const auto results = run_validation(SystemParams{}, 1, 60);
  ASSERT_FALSE(results.empty());
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed) << r.name << " worst=" << r.worst << " " << r.detail;
    EXPECT_GT(r.cases, 0u) << r.name;
  }
}

TEST(Validate, InjectedOverlapAboveOneFailsPositivity) {
  SystemParams p;
  p.eta = 1.5;
  const auto results = run_validation(p, 1, 10);
  const auto& psd = results.front();
  EXPECT_EQ(psd.name, "decay_matrix_psd[configured]");
  EXPECT_FALSE(psd.passed);
  EXPECT_NE(psd.detail.find("min eigenvalue -"), std::string::npos);
  EXPECT_NE(psd.detail.find("eta=1.5"), std::string::npos);
  const std::string report = format_report(results);
  EXPECT_NE(report.find("FAIL decay_matrix_psd[configured]"), std::string::npos);
}

TEST(Validate, PassSetIsSeedIndependent) {
  const auto reference = passed_names(run_validation(SystemParams{}, 100, 30));
  for (std::uint64_t seed = 101; seed < 110; ++seed)
    EXPECT_EQ(passed_names(run_validation(SystemParams{}, seed, 30)), reference) << "seed " << seed;
}

TEST(Validate, ReportIsDeterministic) {
  EXPECT_EQ(format_report(run_validation(SystemParams{}, 3, 15)),
            format_report(run_validation(SystemParams{}, 3, 15)));
}

}  // namespace
}  // namespace fanoqed
