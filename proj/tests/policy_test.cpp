#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "svrpg/diagnostics.hpp"
#include "svrpg/policy.hpp"
#include "test_util.hpp"

using namespace svrpg;
using svrpg::testing::vec;

namespace {

double mlp_log_density_oracle(const Eigen::VectorXd& theta, int n, int a_dim, int hidden,
                              double sigma, const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
  int k = 0;
  std::vector<double> h(hidden);
  for (int j = 0; j < hidden; ++j) {
    double z = 0.0;
    for (int i = 0; i < n; ++i) z += theta(k + j * n + i) * s(i);
    h[j] = z;
  }
  k += hidden * n;
  for (int j = 0; j < hidden; ++j) h[j] = std::tanh(h[j] + theta(k + j));
  k += hidden;
  double log_p = 0.0;
  for (int o = 0; o < a_dim; ++o) {
    double mean = theta(k + hidden * a_dim + o);
    for (int j = 0; j < hidden; ++j) mean += theta(k + o * hidden + j) * h[j];
    const double z = (a(o) - mean) / sigma;
    log_p += -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2 * M_PI);
  }
  return log_p;
}

}  // namespace

TEST(GaussianLinear, PeakDensity) {
  const GaussianLinearPolicy policy(2, 1, 1.0, 100.0, vec({0.5, -1.0, 0.25}));
  const Eigen::VectorXd s = vec({1.0, 2.0});
  const Eigen::VectorXd a = policy.mean(s);
  EXPECT_NEAR(a(0), 0.5 - 2.0 + 0.25, 1e-15);
  EXPECT_NEAR(policy.log_prob(s, a), -std::log(std::sqrt(2 * M_PI)), 1e-14);
  EXPECT_LT(policy.score(s, a).norm(), 1e-15);
}

TEST(GaussianLinear, ScorePlugIn) {
  // phi(s) = (s, 1) with s = 1 and the bias column zeroed by the state.
  const GaussianLinearPolicy policy(1, 1, 1.0, 100.0, vec({0.0, 0.0}));
  const Eigen::VectorXd score = policy.score(vec({1.0}), vec({1.0}));
  EXPECT_NEAR(score(0), 1.0, 1e-15);
  EXPECT_NEAR(score(1), 1.0, 1e-15);
  const Eigen::VectorXd score0 = policy.score(vec({0.0}), vec({1.0}));
  EXPECT_NEAR(score0(0), 0.0, 1e-15);
  EXPECT_NEAR(score0(1), 1.0, 1e-15);
}

TEST(GaussianLinear, FeaturesAreNormClipped) {
  const GaussianLinearPolicy policy(2, 1, 1.0, 2.0);
  const Eigen::VectorXd phi = policy.features(vec({30.0, -40.0}));
  EXPECT_NEAR(phi.norm(), 2.0, 1e-12);
  const Eigen::VectorXd small = policy.features(vec({0.5, 0.5}));
  EXPECT_EQ(small, vec({0.5, 0.5, 1.0}));
}

TEST(GaussianLinear, TinySigmaSamplesTheMean) {
  const GaussianLinearPolicy policy(2, 1, 1e-8, 100.0, vec({0.3, 0.2, -0.1}));
  RngStream rng(1);
  const Eigen::VectorXd s = vec({0.7, -0.4});
  EXPECT_NEAR(policy.sample_action(s, rng)(0), policy.mean(s)(0), 1e-6);
}

TEST(GaussianLinear, SampleMoments) {
  const GaussianLinearPolicy policy(2, 1, 0.7, 100.0, vec({0.3, 0.2, -0.1}));
  RngStream rng(2);
  const Eigen::VectorXd s = vec({0.7, -0.4});
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = policy.sample_action(s, rng)(0);
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double sigma2 = 0.49;
  EXPECT_NEAR(mean, policy.mean(s)(0), 3 * std::sqrt(sigma2 / n));
  // Var of the sample variance of a normal is 2 sigma^4 / n.
  EXPECT_NEAR(var, sigma2, 3 * std::sqrt(2 * sigma2 * sigma2 / n));
}

TEST(GaussianMlp, LogDensityMatchesForwardPassOracle) {
  RngStream rng(3);
  const int n = 3, a_dim = 2, hidden = 4;
  const Eigen::VectorXd theta =
      random_parameters(GaussianMlpPolicy::parameter_count(n, a_dim, hidden), 0.3, rng);
  const GaussianMlpPolicy policy(n, a_dim, hidden, 0.9, theta);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd s = random_parameters(n, 1.0, rng);
    const Eigen::VectorXd a = random_parameters(a_dim, 1.0, rng);
    EXPECT_NEAR(policy.log_prob(s, a), mlp_log_density_oracle(theta, n, a_dim, hidden, 0.9, s, a),
                1e-12);
  }
}

TEST(GaussianMlp, ScoreMatchesFiniteDifferences) {
  RngStream rng(4);
  const GaussianMlpPolicy policy = GaussianMlpPolicy::initialized(4, 1, 8, 0.8, 12);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd s = random_parameters(4, 1.0, rng);
    const Eigen::VectorXd a = random_parameters(1, 1.0, rng);
    const Eigen::VectorXd fd = central_difference(
        [&](const Eigen::VectorXd& t) { return policy.with_parameters(t)->log_prob(s, a); },
        policy.parameters(), 1e-5);
    EXPECT_LT(relative_error(policy.score(s, a), fd), 1e-5);
  }
}

TEST(GaussianMlp, InitializationIsSeededAndBounded) {
  const auto a = GaussianMlpPolicy::initialized(4, 1, 8, 1.0, 5);
  const auto b = GaussianMlpPolicy::initialized(4, 1, 8, 1.0, 5);
  const auto c = GaussianMlpPolicy::initialized(4, 1, 8, 1.0, 6);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_NE(a.parameters(), c.parameters());
  EXPECT_EQ(a.dimension(), 4 * 8 + 8 + 8 + 1);
  // First layer fan-in is 4.
  EXPECT_LE(a.parameters().head(40).cwiseAbs().maxCoeff(), 0.5);
}

TEST(SoftmaxTabular, UniformLogits) {
  const SoftmaxTabularPolicy policy(2, 4);
  EXPECT_NEAR(policy.log_prob(vec({1}), vec({3})), std::log(0.25), 1e-15);
}

TEST(SoftmaxTabular, ScoreIsIndicatorMinusProbability) {
  RngStream rng(5);
  const SoftmaxTabularPolicy policy(2, 3, random_parameters(6, 2.0, rng));
  const Eigen::VectorXd p = policy.probabilities(1);
  const Eigen::VectorXd score = policy.score(vec({1}), vec({2}));
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(score(a), 0.0);
    EXPECT_NEAR(score(3 + a), (a == 2 ? 1.0 : 0.0) - p(a), 1e-15);
  }
}

TEST(SoftmaxTabular, DominantActionFrequency) {
  const SoftmaxTabularPolicy policy(1, 3, vec({0.0, 12.0, 0.0}));
  RngStream rng(6);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += policy.sample_action(vec({0}), rng)(0) == 1.0;
  EXPECT_GT(hits / 10000.0, 0.999);
}

TEST(SoftmaxTabular, ExtremeLogitsStayFinite) {
  const SoftmaxTabularPolicy policy(1, 2, vec({800.0, -800.0}));
  EXPECT_NEAR(policy.log_prob(vec({0}), vec({0})), 0.0, 1e-15);
  EXPECT_NEAR(policy.log_prob(vec({0}), vec({1})), -1600.0, 1e-9);
}

TEST(ScoreBounds, GaussianLinearClosedForm) {
  // ||phi|| <= 1 via the feature bound; residuals |a - mean| <= c.
  const double sigma = 0.5, c = 0.3;
  const GaussianLinearPolicy policy(2, 1, sigma, 1.0, vec({0.2, -0.1, 0.05}));
  double max_phi_sq = 0.0;
  const StateActionSampler sampler = [&](RngStream& rng) {
    const Eigen::VectorXd s = random_parameters(2, 3.0, rng);
    const Eigen::VectorXd a = policy.mean(s) + vec({rng.uniform(-c, c)});
    max_phi_sq = std::max(max_phi_sq, policy.features(s).squaredNorm());
    return std::make_pair(s, a);
  };
  const ScoreBounds b = estimate_score_bounds(policy, sampler, 2000, 1);
  EXPECT_LE(b.G, c / (sigma * sigma) + 1e-9);
  EXPECT_NEAR(b.M, max_phi_sq / (sigma * sigma), 1e-4);
}

TEST(ScoreBounds, SoftmaxScoreIsAtMostTwo) {
  RngStream init(7);
  const SoftmaxTabularPolicy policy(3, 4, random_parameters(12, 5.0, init));
  const StateActionSampler sampler = [](RngStream& rng) {
    return std::make_pair(vec({double(rng.uniform_index(3))}), vec({double(rng.uniform_index(4))}));
  };
  const ScoreBounds b = estimate_score_bounds(policy, sampler, 500, 2);
  EXPECT_LE(b.G, 2.0 + 1e-9);
  EXPECT_GT(b.M, 0.0);
}

TEST(ScoreBounds, TwoArmSoftmaxSupremum) {
  // Over all logits the score norm is at most sqrt(2) and the Hessian norm
  // at most 1/2 (attained at equal logits).
  const StateActionSampler sampler = [](RngStream& rng) {
    return std::make_pair(vec({0.0}), vec({double(rng.uniform_index(2))}));
  };
  for (double gap : {0.0, 1.0, 5.0, 20.0}) {
    const SoftmaxTabularPolicy policy(1, 2, vec({gap, 0.0}));
    const ScoreBounds b = estimate_score_bounds(policy, sampler, 50, 3);
    EXPECT_LE(b.G, kTwoArmSoftmaxG + 1e-12);
    EXPECT_LE(b.M, kTwoArmSoftmaxM + 1e-6);
  }
}

TEST(Policy, RejectsBadArguments) {
  EXPECT_THROW(GaussianLinearPolicy(2, 1, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(GaussianLinearPolicy(2, 1, 1.0, 1.0, vec({1.0})), std::invalid_argument);
  EXPECT_THROW(SoftmaxTabularPolicy(2, 2, vec({1.0})), std::invalid_argument);
  EXPECT_THROW(parse_policy_family("beta"), std::invalid_argument);
  EXPECT_EQ(parse_policy_family(to_string(PolicyFamily::GaussianMlp)), PolicyFamily::GaussianMlp);
}
