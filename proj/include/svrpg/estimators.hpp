#ifndef SVRPG_ESTIMATORS_HPP
#define SVRPG_ESTIMATORS_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svrpg/policy.hpp"
#include "svrpg/tabular_mdp.hpp"
#include "svrpg/trajectory.hpp"

namespace svrpg {

enum class EstimatorKind { Reinforce, Gpomdp };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

/// [sum_h score(s_h, a_h)] * [sum_h gamma^h r_h - baseline]
Eigen::VectorXd reinforce_grad(const Trajectory& trajectory, const Policy& policy, double gamma,
                               double baseline = 0.0);

/// sum_h (sum_{t<=h} score(s_t, a_t)) * (gamma^h r_h - b_h). An empty
/// baseline span means b_h = 0; otherwise it must cover the horizon.
Eigen::VectorXd gpomdp_grad(const Trajectory& trajectory, const Policy& policy, double gamma,
                            std::span<const double> baselines = {});

struct EstimatorParams {
  EstimatorKind kind = EstimatorKind::Gpomdp;
  double gamma = 0.99;
  double baseline = 0.0;  // REINFORCE constant baseline
  /// GPOMDP: replace b_h = 0 by the batch mean of gamma^h r_h (off by default).
  bool average_step_baseline = false;
};

/// g(tau | theta) for the selected estimator, with explicit GPOMDP
/// per-step baselines.
Eigen::VectorXd trajectory_grad(const Trajectory& trajectory, const Policy& policy,
                                const EstimatorParams& params,
                                std::span<const double> step_baselines = {});

/// Per-step baselines b_h = mean over the batch of gamma^h r_h (zero past
/// the end of shorter trajectories).
std::vector<double> average_step_baselines(std::span<const Trajectory> batch, double gamma);

struct GradientEstimate {
  Eigen::VectorXd grad;
  std::size_t n_trajectories = 0;
  EstimatorKind estimator = EstimatorKind::Gpomdp;
};

/// Mean of the vectors using pairwise (tree) summation.
Eigen::VectorXd pairwise_mean(std::span<const Eigen::VectorXd> values);

/// (1/N) sum_i g(tau_i | theta). Throws std::invalid_argument on an empty batch.
GradientEstimate batch_grad(std::span<const Trajectory> batch, const Policy& policy,
                            const EstimatorParams& params);

struct ExactGradient {
  Eigen::VectorXd grad;  // grad J(theta)
  double value = 0.0;    // J(theta)
};

/// Exhaustive-enumeration gradient sum_tau p(tau) (sum_h score) R(tau) and
/// the objective J(theta) on a tabular MDP.
ExactGradient exact_grad(const TabularMdp& mdp, const Policy& policy);

/// Expectation over p(. | theta) of g(tau | theta) computed by enumeration.
Eigen::VectorXd expected_estimator(const TabularMdp& mdp, const Policy& policy,
                                   const EstimatorParams& params);

/// Trace of the covariance of g(tau | theta) under p(. | theta), by enumeration.
double estimator_variance(const TabularMdp& mdp, const Policy& policy,
                          const EstimatorParams& params);

}  // namespace svrpg

#endif  // SVRPG_ESTIMATORS_HPP
