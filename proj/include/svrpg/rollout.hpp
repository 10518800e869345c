#ifndef SVRPG_ROLLOUT_HPP
#define SVRPG_ROLLOUT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "svrpg/environment.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/rng.hpp"
#include "svrpg/tabular_mdp.hpp"
#include "svrpg/trajectory.hpp"

namespace svrpg {

/// Sum over steps of log pi_theta(a_h | s_h): the only theta-dependent part
/// of log p(tau | theta). Throws std::domain_error if some action has zero
/// probability under a discrete policy.
double policy_log_density(const Trajectory& trajectory, const Policy& policy);

/// log rho(s_0) + sum_h log P(s_{h+1} | s_h, a_h). Requires the final state.
/// Throws std::domain_error for a transition of probability zero.
double environment_log_density(const Trajectory& trajectory, const TabularMdp& mdp);

/// Rolls out `policy` for at most `horizon` steps, stopping early when the
/// environment terminates. Recorded actions are the unclipped policy samples.
Trajectory sample_trajectory(const Environment& env, const Policy& policy, int horizon,
                             RngStream& rng);

/// Identifies the block of trajectories drawn at one optimizer iteration.
/// Trajectory i of the block uses the stream (domain, seed, epoch, iteration, i).
struct BatchKey {
  StreamDomain domain = StreamDomain::Train;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t iteration = 0;
};

std::vector<Trajectory> sample_batch(const Environment& env, const Policy& policy, int horizon,
                                     std::size_t count, const BatchKey& key);

struct WeightedTrajectory {
  Trajectory trajectory;
  double probability = 0.0;
};

inline constexpr double kDefaultEnumerationLimit = 1e7;

/// Number of (state, action) sequences a full enumeration would walk:
/// S^(H+1) * A^H.
double enumeration_size(const TabularMdp& mdp);

/// Calls visit(trajectory, probability) for every trajectory of positive
/// probability under (mdp, policy). Throws std::length_error when
/// enumeration_size exceeds `limit`.
void for_each_trajectory(const TabularMdp& mdp, const Policy& policy,
                         const std::function<void(const Trajectory&, double)>& visit,
                         double limit = kDefaultEnumerationLimit);

std::vector<WeightedTrajectory> enumerate_trajectories(const TabularMdp& mdp, const Policy& policy,
                                                       double limit = kDefaultEnumerationLimit);

}  // namespace svrpg

#endif  // SVRPG_ROLLOUT_HPP
