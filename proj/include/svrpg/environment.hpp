#ifndef SVRPG_ENVIRONMENT_HPP
#define SVRPG_ENVIRONMENT_HPP

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "svrpg/rng.hpp"
#include "svrpg/tabular_mdp.hpp"

namespace svrpg {

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminated = false;
};

struct ActionBounds {
  double low = 0.0;
  double high = 0.0;
};

/// Immutable environment description. State is passed explicitly so any
/// number of rollouts may share one instance.
///
/// step() receives the action exactly as the policy sampled it; continuous
/// environments clip it to action_bounds() internally. The random stream is
/// only consumed by environments with stochastic transitions.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual ActionBounds action_bounds() const = 0;
  virtual double max_reward() const = 0;

  virtual Eigen::VectorXd reset(RngStream& rng) const = 0;
  virtual StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                          RngStream& rng) const = 0;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_pole_length = 0.5;
  double force_limit = 10.0;
  double dt = 0.02;
  double x_threshold = 2.4;
  double angle_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  double init_half_width = 0.05;
};

/// Continuous-force cart-pole with Euler integration.
/// State: (x, x_dot, angle, angle_dot). Reward 1 per step while balanced.
class CartPole final : public Environment {
 public:
  explicit CartPole(CartPoleParams params = {}) : params_(params) {}

  std::string name() const override { return "cartpole"; }
  int state_dim() const override { return 4; }
  int action_dim() const override { return 1; }
  ActionBounds action_bounds() const override { return {-params_.force_limit, params_.force_limit}; }
  double max_reward() const override { return 1.0; }

  Eigen::VectorXd reset(RngStream& rng) const override;
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  RngStream& rng) const override;

  const CartPoleParams& params() const { return params_; }

 private:
  CartPoleParams params_;
};

struct MountainCarParams {
  double min_position = -1.2;
  double max_position = 0.6;
  double max_speed = 0.07;
  double goal_position = 0.45;
  double power = 0.0015;
  double gravity_term = 0.0025;
  double goal_bonus = 100.0;
  double action_cost = 0.1;
  double init_low = -0.6;
  double init_high = -0.4;
};

/// Continuous mountain car. The raw signal (goal bonus on arrival minus
/// action_cost * a^2) is mapped affinely onto [0, 1].
class MountainCar final : public Environment {
 public:
  explicit MountainCar(MountainCarParams params = {}) : params_(params) {}

  std::string name() const override { return "mountaincar"; }
  int state_dim() const override { return 2; }
  int action_dim() const override { return 1; }
  ActionBounds action_bounds() const override { return {-1.0, 1.0}; }
  double max_reward() const override { return 1.0; }

  Eigen::VectorXd reset(RngStream& rng) const override;
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  RngStream& rng) const override;

  double normalize_reward(double raw) const;
  const MountainCarParams& params() const { return params_; }

 private:
  MountainCarParams params_;
};

/// Finite MDP as an environment: states and actions are one-element index
/// vectors, transitions are drawn from the supplied stream.
class TabularEnvironment final : public Environment {
 public:
  explicit TabularEnvironment(TabularMdp mdp);

  std::string name() const override { return "tabular"; }
  int state_dim() const override { return 1; }
  int action_dim() const override { return 1; }
  ActionBounds action_bounds() const override {
    return {0.0, static_cast<double>(mdp_.num_actions - 1)};
  }
  double max_reward() const override { return mdp_.max_reward(); }

  Eigen::VectorXd reset(RngStream& rng) const override;
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  RngStream& rng) const override;

  const TabularMdp& mdp() const { return mdp_; }

 private:
  TabularMdp mdp_;
};

/// "cartpole", "mountaincar" or "tabular:<path to JSON>".
std::shared_ptr<const Environment> make_environment(std::string_view spec);

}  // namespace svrpg

#endif  // SVRPG_ENVIRONMENT_HPP
