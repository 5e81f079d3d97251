#include <gtest/gtest.h>

#include <random>

#include "dsaplan/bestfit.hpp"
#include "dsaplan/verifier.hpp"
#include "test_support.hpp"

namespace dsaplan {
namespace {

using testing::three_block_instance;

TEST(VerifyPlan, ValidWorkedExample) {
  auto report = verify_plan(three_block_instance(), {{2, 0, 2}, 6, Provenance::BestFit});
  EXPECT_TRUE(report.valid);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.peak_recomputed, 6u);
  EXPECT_TRUE(report.capacity_ok);
  // (4*2 + 2*3 + 3*2) / (6 * 5)
  EXPECT_DOUBLE_EQ(report.utilization, 20.0 / 30.0);
}

TEST(VerifyPlan, ReportsOverlapMagnitudes) {
  auto report = verify_plan(three_block_instance(), {{0, 0, 2}, 5, Provenance::BestFit});
  EXPECT_FALSE(report.valid);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0], (Violation{1, 2, 2, 1}));
  EXPECT_EQ(report.peak_recomputed, 5u);
}

TEST(VerifyPlan, EmptyInstance) {
  auto report = verify_plan(build_instance({}), Plan{});
  EXPECT_TRUE(report.valid);
  EXPECT_EQ(report.peak_recomputed, 0u);
  EXPECT_EQ(report.utilization, 0.0);
}

TEST(VerifyPlan, WrongPeakClaimIsInvalid) {
  auto report = verify_plan(three_block_instance(), {{2, 0, 2}, 7, Provenance::BestFit});
  EXPECT_FALSE(report.valid);
  EXPECT_FALSE(report.peak_matches);
  EXPECT_TRUE(report.violations.empty());
}

TEST(VerifyPlan, CapacityExceededIsReportedSeparately) {
  auto inst = build_instance({{0, 4, 0, 2, ""}, {0, 4, 1, 3, ""}}, Bytes{6});
  auto report = verify_plan(inst, {{0, 4}, 8, Provenance::BestFit});
  EXPECT_TRUE(report.valid);
  EXPECT_FALSE(report.capacity_ok);
}

TEST(VerifyPlan, MissingOffset) {
  try {
    verify_plan(three_block_instance(), {{2, 0}, 6, Provenance::BestFit});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingOffset);
  }
}

TEST(VerifyPlan, TouchingLifetimesMayShareBytes) {
  auto inst = build_instance({{0, 4, 0, 2, ""}, {0, 4, 2, 4, ""}});
  EXPECT_TRUE(verify_plan(inst, {{0, 0}, 4, Provenance::BestFit}).valid);
}

TEST(VerifyPlan, AgreesWithIndependentCheckUnderMutation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = testing::random_instance(rng, {40, 32, 40, 15});
    auto plan = solve_bestfit(inst);
    ASSERT_TRUE(verify_plan(inst, plan).valid);
    for (std::size_t k = 0; k < plan.offsets.size(); ++k) {
      if (plan.offsets[k] == 0) continue;
      auto mutated = plan;
      --mutated.offsets[k];
      mutated.peak = plan_peak(inst, mutated.offsets);
      EXPECT_EQ(verify_plan(inst, mutated).valid,
                testing::plan_is_disjoint(inst, mutated.offsets));
    }
  }
}

TEST(ReductionVs, Arithmetic) {
  EXPECT_NEAR(reduction_vs(4, 6), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(reduction_vs(6, 6), 0.0);
  EXPECT_LT(reduction_vs(8, 6), 0.0);
  try {
    reduction_vs(4, 0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroBaseline);
  }
}

TEST(PlanStats, WorkedExample) {
  auto stats = plan_stats(three_block_instance(), {{2, 0, 2}, 6, Provenance::BestFit});
  EXPECT_EQ(stats.peak, 6u);
  EXPECT_EQ(stats.lower_bound, 6u);
  EXPECT_DOUBLE_EQ(stats.gap_ratio, 1.0);
}

}  // namespace
}  // namespace dsaplan
