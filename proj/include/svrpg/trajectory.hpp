#ifndef SVRPG_TRAJECTORY_HPP
#define SVRPG_TRAJECTORY_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace svrpg {

/// One rollout s_0, a_0, r_0, ..., s_{H-1}, a_{H-1}, r_{H-1}[, s_H].
///
/// `states` holds either horizon() entries or horizon() + 1 when the state
/// reached after the last action is retained. Tabular environments encode the
/// state and action indices as one-element vectors.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> actions;
  std::vector<double> rewards;
  bool terminated = false;  // environment signalled termination before the horizon

  std::size_t horizon() const { return actions.size(); }
  bool has_final_state() const { return states.size() == actions.size() + 1; }

  /// Throws std::invalid_argument when the length invariants or the reward
  /// range [0, max_reward] are violated.
  void validate(double max_reward) const;
};

/// Sum of gamma^h r_h over the recorded steps.
double discounted_return(const Trajectory& trajectory, double gamma);

/// Plain sum of rewards; this is what evaluation curves report.
double undiscounted_return(const Trajectory& trajectory);

}  // namespace svrpg

#endif  // SVRPG_TRAJECTORY_HPP
