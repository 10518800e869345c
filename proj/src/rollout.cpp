#include "svrpg/rollout.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace svrpg {

double policy_log_density(const Trajectory& trajectory, const Policy& policy) {
  double total = 0.0;
  for (std::size_t h = 0; h < trajectory.horizon(); ++h) {
    const double lp = policy.log_prob(trajectory.states[h], trajectory.actions[h]);
    if (lp == -std::numeric_limits<double>::infinity())
      throw std::domain_error("trajectory action at step " + std::to_string(h) +
                              " has zero probability under the policy");
    total += lp;
  }
  return total;
}

double environment_log_density(const Trajectory& trajectory, const TabularMdp& mdp) {
  if (!trajectory.has_final_state())
    throw std::invalid_argument("environment density needs the final state of the trajectory");
  auto index = [&](const Eigen::VectorXd& v, int bound, const char* what) {
    if (v.size() != 1) throw std::invalid_argument(std::string(what) + " must be a one-element vector");
    const auto i = static_cast<int>(v(0));
    if (i < 0 || i >= bound || static_cast<double>(i) != v(0))
      throw std::invalid_argument(std::string(what) + " index out of range");
    return i;
  };
  const int s0 = index(trajectory.states.front(), mdp.num_states, "state");
  if (mdp.rho[static_cast<std::size_t>(s0)] <= 0.0)
    throw std::domain_error("initial state has zero probability under rho");
  double total = std::log(mdp.rho[static_cast<std::size_t>(s0)]);
  for (std::size_t h = 0; h < trajectory.horizon(); ++h) {
    const int s = index(trajectory.states[h], mdp.num_states, "state");
    const int a = index(trajectory.actions[h], mdp.num_actions, "action");
    const int next = index(trajectory.states[h + 1], mdp.num_states, "state");
    const double p = mdp.transition_prob(s, a, next);
    if (p <= 0.0)
      throw std::domain_error("impossible transition at step " + std::to_string(h));
    total += std::log(p);
  }
  return total;
}

Trajectory sample_trajectory(const Environment& env, const Policy& policy, int horizon,
                             RngStream& rng) {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be at least 1");
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.actions.reserve(static_cast<std::size_t>(horizon));
  traj.rewards.reserve(static_cast<std::size_t>(horizon));
  Eigen::VectorXd state = env.reset(rng);
  for (int h = 0; h < horizon; ++h) {
    Eigen::VectorXd action = policy.sample_action(state, rng);
    StepResult result = env.step(state, action, rng);
    traj.states.push_back(std::move(state));
    traj.actions.push_back(std::move(action));
    traj.rewards.push_back(result.reward);
    state = std::move(result.next_state);
    if (result.terminated) {
      traj.terminated = true;
      break;
    }
  }
  traj.states.push_back(std::move(state));
  return traj;
}

std::vector<Trajectory> sample_batch(const Environment& env, const Policy& policy, int horizon,
                                     std::size_t count, const BatchKey& key) {
  std::vector<Trajectory> batch;
  batch.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(key.domain, key.seed, key.epoch, key.iteration, i);
    batch.push_back(sample_trajectory(env, policy, horizon, rng));
  }
  return batch;
}

double enumeration_size(const TabularMdp& mdp) {
  return std::pow(static_cast<double>(mdp.num_states), mdp.horizon + 1) *
         std::pow(static_cast<double>(mdp.num_actions), mdp.horizon);
}

namespace {

struct Enumerator {
  const TabularMdp& mdp;
  const Policy& policy;
  const std::function<void(const Trajectory&, double)>& visit;
  Trajectory traj;

  void extend(int depth, double log_p) {
    const int s = static_cast<int>(traj.states.back()(0));
    if (depth == mdp.horizon) {
      visit(traj, std::exp(log_p));
      return;
    }
    for (int a = 0; a < mdp.num_actions; ++a) {
      Eigen::VectorXd action(1);
      action(0) = a;
      const double log_pi = policy.log_prob(traj.states.back(), action);
      traj.actions.push_back(action);
      traj.rewards.push_back(mdp.reward(s, a));
      for (int next = 0; next < mdp.num_states; ++next) {
        const double p = mdp.transition_prob(s, a, next);
        if (p <= 0.0) continue;
        Eigen::VectorXd state(1);
        state(0) = next;
        traj.states.push_back(std::move(state));
        extend(depth + 1, log_p + log_pi + std::log(p));
        traj.states.pop_back();
      }
      traj.actions.pop_back();
      traj.rewards.pop_back();
    }
  }
};

}  // namespace

void for_each_trajectory(const TabularMdp& mdp, const Policy& policy,
                         const std::function<void(const Trajectory&, double)>& visit,
                         double limit) {
  mdp.validate();
  if (enumeration_size(mdp) > limit)
    throw std::length_error("trajectory enumeration would visit " +
                            std::to_string(enumeration_size(mdp)) +
                            " sequences; use a smaller oracle MDP (fewer states/actions or a shorter horizon)");
  Enumerator e{mdp, policy, visit, {}};
  for (int s0 = 0; s0 < mdp.num_states; ++s0) {
    const double rho = mdp.rho[static_cast<std::size_t>(s0)];
    if (rho <= 0.0) continue;
    Eigen::VectorXd state(1);
    state(0) = s0;
    e.traj.states.assign(1, state);
    e.extend(0, std::log(rho));
  }
}

std::vector<WeightedTrajectory> enumerate_trajectories(const TabularMdp& mdp, const Policy& policy,
                                                       double limit) {
  std::vector<WeightedTrajectory> out;
  for_each_trajectory(
      mdp, policy,
      [&](const Trajectory& t, double p) { out.push_back(WeightedTrajectory{t, p}); }, limit);
  return out;
}

}  // namespace svrpg
