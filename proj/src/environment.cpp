#include "svrpg/environment.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace svrpg {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::domain_error(std::string("non-finite ") + what);
}

void require_size(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(v.size()) +
                                ", expected " + std::to_string(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// CartPole

Eigen::VectorXd CartPole::reset(RngStream& rng) const {
  Eigen::VectorXd state(4);
  const double w = params_.init_half_width;
  for (Eigen::Index i = 0; i < 4; ++i) state(i) = w > 0.0 ? rng.uniform(-w, w) : 0.0;
  return state;
}

StepResult CartPole::step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                          RngStream& /*rng*/) const {
  require_size(state, 4, "cart-pole state");
  require_size(action, 1, "cart-pole action");
  require_finite(state, "cart-pole state");
  require_finite(action, "cart-pole action");

  const CartPoleParams& p = params_;
  const double force = std::clamp(action(0), -p.force_limit, p.force_limit);
  const double x = state(0), x_dot = state(1), angle = state(2), angle_dot = state(3);

  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_mass_length = p.pole_mass * p.half_pole_length;
  const double cos_a = std::cos(angle);
  const double sin_a = std::sin(angle);

  const double temp = (force + pole_mass_length * angle_dot * angle_dot * sin_a) / total_mass;
  const double angle_acc =
      (p.gravity * sin_a - cos_a * temp) /
      (p.half_pole_length * (4.0 / 3.0 - p.pole_mass * cos_a * cos_a / total_mass));
  const double x_acc = temp - pole_mass_length * angle_acc * cos_a / total_mass;

  StepResult out;
  out.next_state.resize(4);
  out.next_state << x + p.dt * x_dot, x_dot + p.dt * x_acc, angle + p.dt * angle_dot,
      angle_dot + p.dt * angle_acc;
  out.terminated = std::abs(out.next_state(0)) > p.x_threshold ||
                   std::abs(out.next_state(2)) > p.angle_threshold;
  out.reward = out.terminated ? 0.0 : 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// MountainCar

Eigen::VectorXd MountainCar::reset(RngStream& rng) const {
  Eigen::VectorXd state(2);
  state(0) = params_.init_low < params_.init_high ? rng.uniform(params_.init_low, params_.init_high)
                                                  : params_.init_low;
  state(1) = 0.0;
  return state;
}

double MountainCar::normalize_reward(double raw) const {
  const double lowest = -params_.action_cost;
  const double highest = params_.goal_bonus;
  return std::clamp((raw - lowest) / (highest - lowest), 0.0, 1.0);
}

StepResult MountainCar::step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                             RngStream& /*rng*/) const {
  require_size(state, 2, "mountain-car state");
  require_size(action, 1, "mountain-car action");
  require_finite(state, "mountain-car state");
  require_finite(action, "mountain-car action");

  const MountainCarParams& p = params_;
  const double force = std::clamp(action(0), -1.0, 1.0);
  double position = state(0);
  double velocity = state(1);

  velocity += force * p.power - p.gravity_term * std::cos(3.0 * position);
  velocity = std::clamp(velocity, -p.max_speed, p.max_speed);
  position += velocity;
  position = std::clamp(position, p.min_position, p.max_position);
  if (position == p.min_position && velocity < 0.0) velocity = 0.0;

  StepResult out;
  out.next_state.resize(2);
  out.next_state << position, velocity;
  out.terminated = position >= p.goal_position && velocity >= 0.0;
  const double raw = (out.terminated ? p.goal_bonus : 0.0) - p.action_cost * force * force;
  out.reward = normalize_reward(raw);
  return out;
}

// ---------------------------------------------------------------------------
// TabularEnvironment

TabularEnvironment::TabularEnvironment(TabularMdp mdp) : mdp_(std::move(mdp)) { mdp_.validate(); }

Eigen::VectorXd TabularEnvironment::reset(RngStream& rng) const {
  Eigen::VectorXd state(1);
  state(0) = static_cast<double>(rng.categorical(mdp_.rho));
  return state;
}

StepResult TabularEnvironment::step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                                    RngStream& rng) const {
  require_size(state, 1, "tabular state");
  require_size(action, 1, "tabular action");
  require_finite(state, "tabular state");
  require_finite(action, "tabular action");
  const auto s = static_cast<int>(state(0));
  const auto a = static_cast<int>(action(0));
  if (s < 0 || s >= mdp_.num_states || a < 0 || a >= mdp_.num_actions)
    throw std::invalid_argument("tabular state or action index out of range");
  const std::span<const double> row(
      mdp_.transition.data() + (static_cast<std::size_t>(s) * mdp_.num_actions + a) * mdp_.num_states,
      static_cast<std::size_t>(mdp_.num_states));
  StepResult out;
  out.next_state.resize(1);
  out.next_state(0) = static_cast<double>(rng.categorical(row));
  out.reward = mdp_.reward(s, a);
  return out;
}

std::shared_ptr<const Environment> make_environment(std::string_view spec) {
  if (spec == "cartpole") return std::make_shared<CartPole>();
  if (spec == "mountaincar") return std::make_shared<MountainCar>();
  constexpr std::string_view prefix = "tabular:";
  if (spec.starts_with(prefix))
    return std::make_shared<TabularEnvironment>(TabularMdp::load(std::string(spec.substr(prefix.size()))));
  throw std::invalid_argument("unknown environment '" + std::string(spec) + "'");
}

}  // namespace svrpg
