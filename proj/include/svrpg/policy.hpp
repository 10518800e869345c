#ifndef SVRPG_POLICY_HPP
#define SVRPG_POLICY_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "svrpg/rng.hpp"

namespace svrpg {

enum class PolicyFamily { GaussianLinear, GaussianMlp, SoftmaxTabular };

std::string_view to_string(PolicyFamily family);
PolicyFamily parse_policy_family(std::string_view name);

/// Stochastic policy pi_theta(a | s) over a flat parameter vector.
///
/// Policies are immutable: optimizers build a new policy with
/// with_parameters() rather than mutating one that may be shared.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyFamily family() const = 0;
  virtual std::unique_ptr<Policy> with_parameters(Eigen::VectorXd theta) const = 0;

  /// Exact log-density (Gaussian families) or log-probability (softmax).
  virtual double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const = 0;
  /// Gradient of log_prob with respect to the parameters.
  virtual Eigen::VectorXd score(const Eigen::VectorXd& state,
                                const Eigen::VectorXd& action) const = 0;
  virtual Eigen::VectorXd sample_action(const Eigen::VectorXd& state, RngStream& rng) const = 0;

  const Eigen::VectorXd& parameters() const { return theta_; }
  Eigen::Index dimension() const { return theta_.size(); }

 protected:
  explicit Policy(Eigen::VectorXd theta) : theta_(std::move(theta)) {}

  Eigen::VectorXd theta_;
};

/// Gaussian with fixed standard deviation and mean Theta * phi(s), where
/// phi(s) = [s; 1] rescaled so that ||phi(s)|| <= feature_bound.
/// Theta is action_dim x (state_dim + 1), stored row-major in theta.
class GaussianLinearPolicy final : public Policy {
 public:
  GaussianLinearPolicy(int state_dim, int action_dim, double sigma, double feature_bound,
                       Eigen::VectorXd theta);
  GaussianLinearPolicy(int state_dim, int action_dim, double sigma, double feature_bound);

  PolicyFamily family() const override { return PolicyFamily::GaussianLinear; }
  std::unique_ptr<Policy> with_parameters(Eigen::VectorXd theta) const override;
  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd score(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd sample_action(const Eigen::VectorXd& state, RngStream& rng) const override;

  Eigen::VectorXd features(const Eigen::VectorXd& state) const;
  Eigen::VectorXd mean(const Eigen::VectorXd& state) const;
  double sigma() const { return sigma_; }
  double feature_bound() const { return feature_bound_; }
  int feature_dim() const { return state_dim_ + 1; }

 private:
  int state_dim_;
  int action_dim_;
  double sigma_;
  double feature_bound_;
};

/// Gaussian with fixed standard deviation whose mean is a one-hidden-layer
/// tanh network: mean(s) = W2 tanh(W1 s + b1) + b2.
/// Parameter layout: W1 (hidden x state_dim, row-major), b1, W2
/// (action_dim x hidden, row-major), b2.
class GaussianMlpPolicy final : public Policy {
 public:
  GaussianMlpPolicy(int state_dim, int action_dim, int hidden, double sigma,
                    Eigen::VectorXd theta);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static GaussianMlpPolicy initialized(int state_dim, int action_dim, int hidden, double sigma,
                                       std::uint64_t seed);
  static Eigen::Index parameter_count(int state_dim, int action_dim, int hidden);

  PolicyFamily family() const override { return PolicyFamily::GaussianMlp; }
  std::unique_ptr<Policy> with_parameters(Eigen::VectorXd theta) const override;
  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd score(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd sample_action(const Eigen::VectorXd& state, RngStream& rng) const override;

  Eigen::VectorXd mean(const Eigen::VectorXd& state) const;
  double sigma() const { return sigma_; }
  int hidden() const { return hidden_; }

 private:
  int state_dim_;
  int action_dim_;
  int hidden_;
  double sigma_;
};

/// Softmax over per-state logits: theta[s * A + a] is the logit of a in s.
/// States and actions are one-element vectors holding the index.
class SoftmaxTabularPolicy final : public Policy {
 public:
  SoftmaxTabularPolicy(int num_states, int num_actions, Eigen::VectorXd theta);
  SoftmaxTabularPolicy(int num_states, int num_actions);

  PolicyFamily family() const override { return PolicyFamily::SoftmaxTabular; }
  std::unique_ptr<Policy> with_parameters(Eigen::VectorXd theta) const override;
  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd score(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const override;
  Eigen::VectorXd sample_action(const Eigen::VectorXd& state, RngStream& rng) const override;

  Eigen::VectorXd probabilities(int state) const;
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

 private:
  int state_index(const Eigen::VectorXd& state) const;
  int action_index(const Eigen::VectorXd& action) const;

  int num_states_;
  int num_actions_;
};

struct ScoreBounds {
  double G = 0.0;  // sup ||score||_2
  double M = 0.0;  // sup spectral norm of the log-density Hessian
};

using StateActionSampler = std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(RngStream&)>;

/// Empirical sup of the score norm and of the Hessian spectral norm over
/// n_samples draws from `sampler`. The Hessian is the symmetrized central
/// difference of the score. Throws std::runtime_error on non-finite results.
ScoreBounds estimate_score_bounds(const Policy& policy, const StateActionSampler& sampler,
                                  int n_samples, std::uint64_t seed, double fd_step = 1e-5);

/// Symmetrized central-difference Hessian of log_prob at one (s, a).
Eigen::MatrixXd log_prob_hessian(const Policy& policy, const Eigen::VectorXd& state,
                                 const Eigen::VectorXd& action, double fd_step = 1e-5);

}  // namespace svrpg

#endif  // SVRPG_POLICY_HPP
