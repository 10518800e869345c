#include "svrpg/estimators.hpp"

#include <stdexcept>
#include <string>

#include "svrpg/rollout.hpp"

namespace svrpg {

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::Reinforce ? "reinforce" : "gpomdp";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "reinforce") return EstimatorKind::Reinforce;
  if (name == "gpomdp") return EstimatorKind::Gpomdp;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

Eigen::VectorXd reinforce_grad(const Trajectory& trajectory, const Policy& policy, double gamma,
                               double baseline) {
  Eigen::VectorXd score_sum = Eigen::VectorXd::Zero(policy.dimension());
  for (std::size_t h = 0; h < trajectory.horizon(); ++h)
    score_sum += policy.score(trajectory.states[h], trajectory.actions[h]);
  return score_sum * (discounted_return(trajectory, gamma) - baseline);
}

Eigen::VectorXd gpomdp_grad(const Trajectory& trajectory, const Policy& policy, double gamma,
                            std::span<const double> baselines) {
  if (!baselines.empty() && baselines.size() < trajectory.horizon())
    throw std::invalid_argument("GPOMDP baselines shorter than the trajectory horizon");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.dimension());
  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(policy.dimension());
  double discount = 1.0;
  for (std::size_t h = 0; h < trajectory.horizon(); ++h) {
    cumulative += policy.score(trajectory.states[h], trajectory.actions[h]);
    const double b = baselines.empty() ? 0.0 : baselines[h];
    grad += cumulative * (discount * trajectory.rewards[h] - b);
    discount *= gamma;
  }
  return grad;
}

Eigen::VectorXd trajectory_grad(const Trajectory& trajectory, const Policy& policy,
                                const EstimatorParams& params,
                                std::span<const double> step_baselines) {
  if (params.kind == EstimatorKind::Reinforce)
    return reinforce_grad(trajectory, policy, params.gamma, params.baseline);
  return gpomdp_grad(trajectory, policy, params.gamma, step_baselines);
}

std::vector<double> average_step_baselines(std::span<const Trajectory> batch, double gamma) {
  std::size_t longest = 0;
  for (const auto& t : batch) longest = std::max(longest, t.horizon());
  std::vector<double> b(longest, 0.0);
  if (batch.empty()) return b;
  for (const auto& t : batch) {
    double discount = 1.0;
    for (std::size_t h = 0; h < t.horizon(); ++h) {
      b[h] += discount * t.rewards[h];
      discount *= gamma;
    }
  }
  for (double& x : b) x /= static_cast<double>(batch.size());
  return b;
}

namespace {

Eigen::VectorXd pairwise_sum(std::span<const Eigen::VectorXd> values) {
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace

Eigen::VectorXd pairwise_mean(std::span<const Eigen::VectorXd> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty set of vectors");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

GradientEstimate batch_grad(std::span<const Trajectory> batch, const Policy& policy,
                            const EstimatorParams& params) {
  if (batch.empty()) throw std::invalid_argument("gradient of an empty trajectory batch");
  std::vector<double> baselines;
  if (params.kind == EstimatorKind::Gpomdp && params.average_step_baseline)
    baselines = average_step_baselines(batch, params.gamma);
  std::vector<Eigen::VectorXd> per_trajectory;
  per_trajectory.reserve(batch.size());
  for (const auto& t : batch) per_trajectory.push_back(trajectory_grad(t, policy, params, baselines));
  return GradientEstimate{pairwise_mean(per_trajectory), batch.size(), params.kind};
}

ExactGradient exact_grad(const TabularMdp& mdp, const Policy& policy) {
  ExactGradient out{Eigen::VectorXd::Zero(policy.dimension()), 0.0};
  for_each_trajectory(mdp, policy, [&](const Trajectory& t, double p) {
    Eigen::VectorXd score_sum = Eigen::VectorXd::Zero(policy.dimension());
    for (std::size_t h = 0; h < t.horizon(); ++h) score_sum += policy.score(t.states[h], t.actions[h]);
    const double ret = discounted_return(t, mdp.gamma);
    out.grad += p * ret * score_sum;
    out.value += p * ret;
  });
  return out;
}

Eigen::VectorXd expected_estimator(const TabularMdp& mdp, const Policy& policy,
                                   const EstimatorParams& params) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(policy.dimension());
  for_each_trajectory(mdp, policy, [&](const Trajectory& t, double p) {
    mean += p * trajectory_grad(t, policy, params);
  });
  return mean;
}

double estimator_variance(const TabularMdp& mdp, const Policy& policy,
                          const EstimatorParams& params) {
  const Eigen::VectorXd mean = expected_estimator(mdp, policy, params);
  double variance = 0.0;
  for_each_trajectory(mdp, policy, [&](const Trajectory& t, double p) {
    variance += p * (trajectory_grad(t, policy, params) - mean).squaredNorm();
  });
  return variance;
}

}  // namespace svrpg
