#include "svrpg/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace svrpg {

void Trajectory::validate(double max_reward) const {
  if (actions.empty()) throw std::invalid_argument("trajectory has no steps");
  if (rewards.size() != actions.size())
    throw std::invalid_argument("trajectory rewards and actions differ in length");
  if (states.size() != actions.size() && states.size() != actions.size() + 1)
    throw std::invalid_argument("trajectory must record horizon or horizon+1 states");
  for (std::size_t h = 0; h < rewards.size(); ++h) {
    const double r = rewards[h];
    if (!(r >= 0.0 && r <= max_reward))
      throw std::invalid_argument("reward " + std::to_string(r) + " at step " + std::to_string(h) +
                                  " outside [0, " + std::to_string(max_reward) + "]");
  }
}

double discounted_return(const Trajectory& trajectory, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("discount must lie in (0, 1)");
  if (trajectory.rewards.empty())
    throw std::invalid_argument("discounted return of an empty trajectory (degenerate rollout)");
  double total = 0.0;
  double discount = 1.0;
  for (double r : trajectory.rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

double undiscounted_return(const Trajectory& trajectory) {
  double total = 0.0;
  for (double r : trajectory.rewards) total += r;
  return total;
}

}  // namespace svrpg
