#include <gtest/gtest.h>

#include <stdexcept>

#include "svrpg/rng.hpp"
#include "svrpg/trajectory.hpp"
#include "test_util.hpp"

using namespace svrpg;
using svrpg::testing::tabular_trajectory;

TEST(DiscountedReturn, VanishingDiscountKeepsFirstReward) {
  const Trajectory t = tabular_trajectory({0, 0, 0}, {0, 0, 0}, {5, 3, 1});
  EXPECT_NEAR(discounted_return(t, 1e-12), 5.0, 1e-10);
}

TEST(DiscountedReturn, GeometricSum) {
  const Trajectory t = tabular_trajectory({0, 0, 0}, {0, 0, 0}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(discounted_return(t, 0.5), 1.75);
  EXPECT_DOUBLE_EQ(undiscounted_return(t), 3.0);
}

TEST(DiscountedReturn, MatchesStepByStepAccumulation) {
  RngStream rng(11);
  std::vector<double> rewards;
  for (int i = 0; i < 10; ++i) rewards.push_back(rng.uniform());
  const Trajectory t =
      tabular_trajectory(std::vector<int>(10, 0), std::vector<int>(10, 0), rewards);

  // Horner form, back to front.
  double expected = 0.0;
  for (int h = 9; h >= 0; --h) expected = rewards[h] + 0.9 * expected;
  EXPECT_NEAR(discounted_return(t, 0.9), expected, 1e-12);
  EXPECT_LE(discounted_return(t, 0.9), (1 - std::pow(0.9, 10)) / 0.1);
}

TEST(DiscountedReturn, RejectsDegenerateInput) {
  EXPECT_THROW(discounted_return(Trajectory{}, 0.9), std::invalid_argument);
  const Trajectory t = tabular_trajectory({0}, {0}, {1});
  EXPECT_THROW(discounted_return(t, 1.0), std::domain_error);
  EXPECT_THROW(discounted_return(t, 0.0), std::domain_error);
}

TEST(TrajectoryValidate, LengthsAndRewardRange) {
  Trajectory t = tabular_trajectory({0, 1}, {0}, {0.5});
  EXPECT_TRUE(t.has_final_state());
  EXPECT_NO_THROW(t.validate(1.0));
  t.states.pop_back();
  EXPECT_FALSE(t.has_final_state());
  EXPECT_NO_THROW(t.validate(1.0));
  t.states.clear();
  EXPECT_THROW(t.validate(1.0), std::invalid_argument);

  const Trajectory too_big = tabular_trajectory({0}, {0}, {1.5});
  EXPECT_THROW(too_big.validate(1.0), std::invalid_argument);
  const Trajectory negative = tabular_trajectory({0}, {0}, {-0.1});
  EXPECT_THROW(negative.validate(1.0), std::invalid_argument);
  const Trajectory mismatch = tabular_trajectory({0, 0}, {0, 0}, {1.0});
  EXPECT_THROW(mismatch.validate(1.0), std::invalid_argument);
}
