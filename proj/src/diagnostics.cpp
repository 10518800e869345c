#include "svrpg/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "svrpg/rollout.hpp"
#include "svrpg/svrpg.hpp"

namespace svrpg {

Eigen::VectorXd random_parameters(Eigen::Index dimension, double scale, RngStream& rng) {
  Eigen::VectorXd theta(dimension);
  for (Eigen::Index i = 0; i < dimension; ++i) theta(i) = rng.uniform(-scale, scale);
  return theta;
}

Eigen::VectorXd random_direction(Eigen::Index dimension, RngStream& rng) {
  Eigen::VectorXd u(dimension);
  for (Eigen::Index i = 0; i < dimension; ++i) u(i) = rng.normal();
  return u.normalized();
}

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& theta, double step) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + step;
    const double plus = f(probe);
    probe(i) = theta(i) - step;
    const double minus = f(probe);
    probe(i) = theta(i);
    grad(i) = (plus - minus) / (2.0 * step);
  }
  return grad;
}

Eigen::VectorXd expected_semi_stochastic_grad(const TabularMdp& mdp, const Policy& reference,
                                              const Policy& current,
                                              const EstimatorParams& estimator) {
  const Eigen::VectorXd mu = expected_estimator(mdp, reference, estimator);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(current.dimension());
  for_each_trajectory(mdp, current, [&](const Trajectory& t, double p) {
    const SemiStochasticGradient v = semi_stochastic_grad(
        mu, std::span<const Trajectory>(&t, 1), reference, current, estimator,
        std::numeric_limits<double>::infinity());
    mean += p * v.v;
  });
  return mean;
}

PropositionCheck proposition_bound_check(const Environment& env,
                                         const GaussianLinearPolicy& policy, int horizon,
                                         const EstimatorParams& estimator,
                                         std::size_t n_trajectories, std::size_t n_pairs,
                                         std::uint64_t seed) {
  if (n_trajectories == 0) throw std::invalid_argument("proposition check needs trajectories");
  const std::vector<Trajectory> trajectories = sample_batch(
      env, policy, horizon, n_trajectories, BatchKey{StreamDomain::Diagnostics, seed, 0, 0});

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> visited;
  for (const auto& t : trajectories)
    for (std::size_t h = 0; h < t.horizon(); ++h) visited.emplace_back(t.states[h], t.actions[h]);
  std::size_t cursor = 0;
  const StateActionSampler replay = [&](RngStream&) { return visited[cursor++]; };

  PropositionCheck out;
  out.bounds = estimate_score_bounds(policy, replay, static_cast<int>(visited.size()), seed);
  const TheoryConstants constants{out.bounds.G, out.bounds.M, env.max_reward(), horizon,
                                  estimator.gamma, estimator.baseline, 0.0, 0.0};
  out.C_g = constants.C_g();
  out.L_g = constants.L_g();
  out.trajectories = trajectories.size();

  for (const auto& t : trajectories) {
    const double ratio = trajectory_grad(t, policy, estimator).norm() / out.C_g;
    out.max_norm_ratio = std::max(out.max_norm_ratio, ratio);
    if (ratio > 1.0) ++out.norm_violations;
  }

  RngStream rng(StreamDomain::Diagnostics, seed, 1, 0, 0);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Trajectory& t = trajectories[rng.uniform_index(trajectories.size())];
    const Eigen::VectorXd theta1 =
        policy.parameters() + random_direction(policy.dimension(), rng) * rng.uniform();
    const Eigen::VectorXd delta = random_direction(policy.dimension(), rng) * rng.uniform();
    const auto p1 = policy.with_parameters(theta1);
    const auto p2 = policy.with_parameters(theta1 + delta);
    const double diff =
        (trajectory_grad(t, *p1, estimator) - trajectory_grad(t, *p2, estimator)).norm();
    const double ratio = diff / (out.L_g * delta.norm());
    out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, ratio);
    if (ratio > 1.0) ++out.lipschitz_violations;
    ++out.pairs;
  }
  return out;
}

TabularMdp theory_bandit() { return bandit_mdp({1.0, 0.0}, 0.5); }

TheoremCheck theorem_bound_check(double epsilon, int seeds, std::uint64_t seed0) {
  const TabularMdp mdp = theory_bandit();
  const SoftmaxTabularPolicy initial(1, 2);
  const EstimatorParams estimator{EstimatorKind::Gpomdp, mdp.gamma, 0.0, false};

  TheoremCheck out;
  const double W = estimate_weight_variance_bound(mdp, initial, 200, 1.0, seed0);
  const double sigma2 = estimate_gradient_variance_bound(mdp, initial, estimator, 200, 4.0, seed0);
  out.constants = derive_constants(kTwoArmSoftmaxG, kTwoArmSoftmaxM, mdp.max_reward(),
                                   mdp.horizon, mdp.gamma, 0.0, W, std::sqrt(sigma2));
  out.schedule = schedule(epsilon, out.constants);
  out.J_gap = optimal_value(mdp) - exact_grad(mdp, initial).value;
  out.bound = theorem_bound(out.constants, out.schedule.S, out.schedule.m, out.schedule.eta,
                            out.schedule.N, out.J_gap);

  const TabularEnvironment env(mdp);
  SvrpgConfig config;
  config.epochs = out.schedule.S;
  config.epoch_length = out.schedule.m;
  config.step_size = out.schedule.eta;
  config.batch_size = out.schedule.N;
  config.minibatch_size = out.schedule.B;
  config.estimator = estimator;
  config.horizon = mdp.horizon;

  double total = 0.0;
  for (int i = 0; i < seeds; ++i) {
    config.seed = seed0 + static_cast<std::uint64_t>(i);
    const OptimizationResult result = svrpg_run(config, env, initial);
    const auto picked = initial.with_parameters(result.uniform_iterate);
    total += exact_grad(mdp, *picked).grad.squaredNorm();
  }
  out.seeds = seeds;
  out.mean_squared_grad = total / seeds;
  return out;
}

double schedule_log_log_slope(const TheoryConstants& constants, std::span<const double> epsilons,
                              double c_N, double c_T, bool inflated) {
  if (epsilons.size() < 2) throw std::invalid_argument("slope needs at least two epsilons");
  std::vector<double> xs, ys;
  for (double eps : epsilons) {
    xs.push_back(std::log(eps));
    const Schedule s = schedule(eps, constants, c_N, c_T);
    ys.push_back(std::log(static_cast<double>(inflated ? s.total_trajectories()
                                                       : s.unconstrained_trajectories())));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace svrpg
