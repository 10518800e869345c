#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "svrpg/environment.hpp"
#include "svrpg/rng.hpp"
#include "test_util.hpp"

using namespace svrpg;
using svrpg::testing::vec;

namespace {

// Straight-line copy of the cart-pole Euler update with the default
// constants written out.
Eigen::VectorXd cartpole_reference_step(const Eigen::VectorXd& s, double force) {
  const double g = 9.8, mc = 1.0, mp = 0.1, l = 0.5, dt = 0.02;
  const double x = s(0), x_dot = s(1), th = s(2), th_dot = s(3);
  const double total = mc + mp;
  const double pml = mp * l;
  const double temp = (force + pml * th_dot * th_dot * std::sin(th)) / total;
  const double th_acc =
      (g * std::sin(th) - std::cos(th) * temp) /
      (l * (4.0 / 3.0 - mp * std::cos(th) * std::cos(th) / total));
  const double x_acc = temp - pml * th_acc * std::cos(th) / total;
  return vec({x + dt * x_dot, x_dot + dt * x_acc, th + dt * th_dot, th_dot + dt * th_acc});
}

}  // namespace

TEST(CartPole, ZeroWidthResetIsExactlyZero) {
  CartPoleParams p;
  p.init_half_width = 0.0;
  RngStream rng(1);
  EXPECT_EQ(CartPole(p).reset(rng), Eigen::VectorXd::Zero(4));
}

TEST(CartPole, ResetMomentsMatchUniform) {
  const CartPole env;
  RngStream rng(2);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd s = env.reset(rng);
    EXPECT_LE(s.cwiseAbs().maxCoeff(), 0.05);
    sum += s;
  }
  const double se = 0.1 / std::sqrt(12.0) / std::sqrt(n);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(sum(i) / n, 0.0, 3 * se);
}

TEST(CartPole, UprightRestIsAnEquilibrium) {
  const CartPole env;
  RngStream rng(3);
  const StepResult r = env.step(Eigen::VectorXd::Zero(4), vec({0.0}), rng);
  EXPECT_EQ(r.next_state, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_FALSE(r.terminated);
}

TEST(CartPole, MatchesReferenceEulerStep) {
  const CartPole env;
  RngStream rng(4);
  const Eigen::VectorXd s = vec({0.3, -0.4, 0.05, 0.7});
  for (double force : {-3.0, 0.0, 2.5, 7.0}) {
    const StepResult r = env.step(s, vec({force}), rng);
    EXPECT_LT((r.next_state - cartpole_reference_step(s, force)).norm(), 1e-14);
  }
  // Force is clipped to the +-10 range.
  const StepResult big = env.step(s, vec({55.0}), rng);
  EXPECT_LT((big.next_state - cartpole_reference_step(s, 10.0)).norm(), 1e-14);
}

TEST(CartPole, TerminatesOutsideLimits) {
  const CartPole env;
  RngStream rng(5);
  const StepResult r = env.step(vec({2.39, 1.0, 0.0, 0.0}), vec({0.0}), rng);
  EXPECT_TRUE(r.terminated);
  EXPECT_EQ(r.reward, 0.0);
  const StepResult tilt = env.step(vec({0.0, 0.0, 0.2, 1.0}), vec({0.0}), rng);
  EXPECT_TRUE(tilt.terminated);
}

TEST(CartPole, RejectsNonFiniteInput) {
  const CartPole env;
  RngStream rng(6);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(env.step(vec({0, 0, nan, 0}), vec({0.0}), rng), std::domain_error);
  EXPECT_THROW(env.step(Eigen::VectorXd::Zero(4), vec({nan}), rng), std::domain_error);
  EXPECT_THROW(env.step(Eigen::VectorXd::Zero(3), vec({0.0}), rng), std::invalid_argument);
}

TEST(MountainCar, ValleyStationaryPoint) {
  const MountainCar env;
  RngStream rng(7);
  const double p = -M_PI / 6.0;
  ASSERT_NEAR(std::cos(3 * p), 0.0, 1e-15);
  const StepResult r = env.step(vec({p, 0.0}), vec({0.0}), rng);
  EXPECT_NEAR(r.next_state(0), p, 1e-15);
  EXPECT_NEAR(r.next_state(1), 0.0, 1e-15);
}

TEST(MountainCar, RewardsAreNormalized) {
  const MountainCar env;
  RngStream rng(8);
  for (double a : {-1.0, -0.3, 0.0, 0.6, 1.0, 4.0}) {
    const StepResult r = env.step(vec({-0.5, 0.01}), vec({a}), rng);
    EXPECT_GE(r.reward, 0.0);
    EXPECT_LE(r.reward, 1.0);
  }
  EXPECT_DOUBLE_EQ(env.normalize_reward(100.0), 1.0);
  EXPECT_DOUBLE_EQ(env.normalize_reward(-0.1), 0.0);
  const StepResult goal = env.step(vec({0.44, 0.05}), vec({1.0}), rng);
  EXPECT_TRUE(goal.terminated);
  EXPECT_NEAR(goal.reward, env.normalize_reward(100.0 - 0.1), 1e-15);
}

TEST(MountainCar, ResetRange) {
  const MountainCar env;
  RngStream rng(9);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd s = env.reset(rng);
    EXPECT_GE(s(0), -0.6);
    EXPECT_LE(s(0), -0.4);
    EXPECT_EQ(s(1), 0.0);
  }
}

TEST(TabularEnvironment, PointMassStart) {
  TabularMdp mdp = default_oracle_mdp();
  mdp.rho = {1.0, 0.0, 0.0};
  const TabularEnvironment env(mdp);
  RngStream rng(10);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(env.reset(rng)(0), 0.0);
}

TEST(TabularEnvironment, RewardsComeFromTable) {
  const TabularMdp mdp = default_oracle_mdp();
  const TabularEnvironment env(mdp);
  RngStream rng(11);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a)
      EXPECT_EQ(env.step(vec({double(s)}), vec({double(a)}), rng).reward, mdp.reward(s, a));
  EXPECT_THROW(env.step(vec({3.0}), vec({0.0}), rng), std::invalid_argument);
}

TEST(MakeEnvironment, ByName) {
  EXPECT_EQ(make_environment("cartpole")->name(), "cartpole");
  EXPECT_EQ(make_environment("mountaincar")->name(), "mountaincar");
  EXPECT_THROW(make_environment("pendulum"), std::invalid_argument);
}
