#ifndef SVRPG_TABULAR_MDP_HPP
#define SVRPG_TABULAR_MDP_HPP

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

namespace svrpg {

/// Finite MDP small enough to enumerate every trajectory.
///
/// Tables are stored flat: transition[(s * A + a) * S + s'] and
/// rewards[s * A + a].
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transition;
  std::vector<double> rewards;
  std::vector<double> rho;
  double gamma = 0.9;
  int horizon = 1;
  /// Declared reward bound R; zero means "use the largest table entry".
  double reward_bound = 0.0;

  double transition_prob(int s, int a, int next) const {
    return transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
  }
  double reward(int s, int a) const {
    return rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
  double max_reward() const;

  /// Throws std::invalid_argument on shape errors, rows that do not sum to
  /// one within 1e-12, negative probabilities or rewards, or bad gamma/horizon.
  void validate() const;

  static TabularMdp from_json(const nlohmann::json& doc);
  static TabularMdp load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// 3 states, 2 actions, horizon 3: the default exact-enumeration oracle.
TabularMdp default_oracle_mdp();

/// One state, one step, one arm per reward entry.
TabularMdp bandit_mdp(std::vector<double> arm_rewards, double gamma = 0.5);

}  // namespace svrpg

#endif  // SVRPG_TABULAR_MDP_HPP
