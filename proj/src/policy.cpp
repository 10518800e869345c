#include "svrpg/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace svrpg {

namespace {

const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

double gaussian_log_density(const Eigen::VectorXd& mean, const Eigen::VectorXd& action,
                            double sigma) {
  const double quad = (action - mean).squaredNorm() / (sigma * sigma);
  return -0.5 * quad - static_cast<double>(mean.size()) * (kLogSqrtTwoPi + std::log(sigma));
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("policy standard deviation must be positive");
}

void check_action_size(const Eigen::VectorXd& action, int action_dim) {
  if (action.size() != action_dim)
    throw std::invalid_argument("action has dimension " + std::to_string(action.size()) +
                                ", policy expects " + std::to_string(action_dim));
}

}  // namespace

std::string_view to_string(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::GaussianLinear: return "gaussian-linear";
    case PolicyFamily::GaussianMlp: return "gaussian-mlp";
    case PolicyFamily::SoftmaxTabular: return "softmax-tabular";
  }
  return "unknown";
}

PolicyFamily parse_policy_family(std::string_view name) {
  if (name == "gaussian-linear") return PolicyFamily::GaussianLinear;
  if (name == "gaussian-mlp") return PolicyFamily::GaussianMlp;
  if (name == "softmax-tabular") return PolicyFamily::SoftmaxTabular;
  throw std::invalid_argument("unknown policy family '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// GaussianLinearPolicy

GaussianLinearPolicy::GaussianLinearPolicy(int state_dim, int action_dim, double sigma,
                                           double feature_bound, Eigen::VectorXd theta)
    : Policy(std::move(theta)),
      state_dim_(state_dim),
      action_dim_(action_dim),
      sigma_(sigma),
      feature_bound_(feature_bound) {
  check_sigma(sigma);
  if (!(feature_bound > 0.0)) throw std::invalid_argument("feature bound must be positive");
  if (theta_.size() != static_cast<Eigen::Index>(action_dim) * (state_dim + 1))
    throw std::invalid_argument("gaussian-linear parameter vector has the wrong dimension");
}

GaussianLinearPolicy::GaussianLinearPolicy(int state_dim, int action_dim, double sigma,
                                           double feature_bound)
    : GaussianLinearPolicy(state_dim, action_dim, sigma, feature_bound,
                           Eigen::VectorXd::Zero(static_cast<Eigen::Index>(action_dim) *
                                                 (state_dim + 1))) {}

std::unique_ptr<Policy> GaussianLinearPolicy::with_parameters(Eigen::VectorXd theta) const {
  return std::make_unique<GaussianLinearPolicy>(state_dim_, action_dim_, sigma_, feature_bound_,
                                                std::move(theta));
}

Eigen::VectorXd GaussianLinearPolicy::features(const Eigen::VectorXd& state) const {
  if (state.size() != state_dim_) throw std::invalid_argument("state has the wrong dimension");
  Eigen::VectorXd phi(state_dim_ + 1);
  phi.head(state_dim_) = state;
  phi(state_dim_) = 1.0;
  const double norm = phi.norm();
  if (norm > feature_bound_) phi *= feature_bound_ / norm;
  return phi;
}

Eigen::VectorXd GaussianLinearPolicy::mean(const Eigen::VectorXd& state) const {
  const Eigen::VectorXd phi = features(state);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      weights(theta_.data(), action_dim_, state_dim_ + 1);
  return weights * phi;
}

double GaussianLinearPolicy::log_prob(const Eigen::VectorXd& state,
                                      const Eigen::VectorXd& action) const {
  check_action_size(action, action_dim_);
  return gaussian_log_density(mean(state), action, sigma_);
}

Eigen::VectorXd GaussianLinearPolicy::score(const Eigen::VectorXd& state,
                                            const Eigen::VectorXd& action) const {
  check_action_size(action, action_dim_);
  const Eigen::VectorXd phi = features(state);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      weights(theta_.data(), action_dim_, state_dim_ + 1);
  const Eigen::VectorXd residual = (action - weights * phi) / (sigma_ * sigma_);
  Eigen::VectorXd grad(theta_.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> out(
      grad.data(), action_dim_, state_dim_ + 1);
  out = residual * phi.transpose();
  return grad;
}

Eigen::VectorXd GaussianLinearPolicy::sample_action(const Eigen::VectorXd& state,
                                                    RngStream& rng) const {
  Eigen::VectorXd action = mean(state);
  for (Eigen::Index i = 0; i < action.size(); ++i) action(i) += sigma_ * rng.normal();
  return action;
}

// ---------------------------------------------------------------------------
// GaussianMlpPolicy

GaussianMlpPolicy::GaussianMlpPolicy(int state_dim, int action_dim, int hidden, double sigma,
                                     Eigen::VectorXd theta)
    : Policy(std::move(theta)),
      state_dim_(state_dim),
      action_dim_(action_dim),
      hidden_(hidden),
      sigma_(sigma) {
  check_sigma(sigma);
  if (state_dim < 1 || action_dim < 1 || hidden < 1)
    throw std::invalid_argument("gaussian-mlp dimensions must be positive");
  if (theta_.size() != parameter_count(state_dim, action_dim, hidden))
    throw std::invalid_argument("gaussian-mlp parameter vector has the wrong dimension");
}

Eigen::Index GaussianMlpPolicy::parameter_count(int state_dim, int action_dim, int hidden) {
  return static_cast<Eigen::Index>(hidden) * state_dim + hidden +
         static_cast<Eigen::Index>(action_dim) * hidden + action_dim;
}

GaussianMlpPolicy GaussianMlpPolicy::initialized(int state_dim, int action_dim, int hidden,
                                                 double sigma, std::uint64_t seed) {
  RngStream rng(StreamDomain::Initialization, seed, 0, 0, 0);
  Eigen::VectorXd theta(parameter_count(state_dim, action_dim, hidden));
  Eigen::Index k = 0;
  const double first = 1.0 / std::sqrt(static_cast<double>(state_dim));
  const double second = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(hidden) * (state_dim + 1); ++i)
    theta(k++) = rng.uniform(-first, first);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(action_dim) * (hidden + 1); ++i)
    theta(k++) = rng.uniform(-second, second);
  return GaussianMlpPolicy(state_dim, action_dim, hidden, sigma, std::move(theta));
}

std::unique_ptr<Policy> GaussianMlpPolicy::with_parameters(Eigen::VectorXd theta) const {
  return std::make_unique<GaussianMlpPolicy>(state_dim_, action_dim_, hidden_, sigma_,
                                             std::move(theta));
}

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

struct MlpView {
  RowMajorMap w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  RowMajorMap w2;
  Eigen::Map<const Eigen::VectorXd> b2;
};

MlpView view(const Eigen::VectorXd& theta, int n, int a, int h) {
  const double* p = theta.data();
  const Eigen::Index w1 = static_cast<Eigen::Index>(h) * n;
  const Eigen::Index w2 = static_cast<Eigen::Index>(a) * h;
  return MlpView{RowMajorMap(p, h, n), Eigen::Map<const Eigen::VectorXd>(p + w1, h),
                 RowMajorMap(p + w1 + h, a, h), Eigen::Map<const Eigen::VectorXd>(p + w1 + h + w2, a)};
}

}  // namespace

Eigen::VectorXd GaussianMlpPolicy::mean(const Eigen::VectorXd& state) const {
  if (state.size() != state_dim_) throw std::invalid_argument("state has the wrong dimension");
  const MlpView net = view(theta_, state_dim_, action_dim_, hidden_);
  const Eigen::VectorXd hidden = (net.w1 * state + net.b1).array().tanh().matrix();
  return net.w2 * hidden + net.b2;
}

double GaussianMlpPolicy::log_prob(const Eigen::VectorXd& state,
                                   const Eigen::VectorXd& action) const {
  check_action_size(action, action_dim_);
  return gaussian_log_density(mean(state), action, sigma_);
}

Eigen::VectorXd GaussianMlpPolicy::score(const Eigen::VectorXd& state,
                                         const Eigen::VectorXd& action) const {
  check_action_size(action, action_dim_);
  if (state.size() != state_dim_) throw std::invalid_argument("state has the wrong dimension");
  const MlpView net = view(theta_, state_dim_, action_dim_, hidden_);
  const Eigen::VectorXd hidden = (net.w1 * state + net.b1).array().tanh().matrix();
  const Eigen::VectorXd out = net.w2 * hidden + net.b2;
  const Eigen::VectorXd d_out = (action - out) / (sigma_ * sigma_);
  const Eigen::VectorXd d_pre =
      ((net.w2.transpose() * d_out).array() * (1.0 - hidden.array().square())).matrix();

  Eigen::VectorXd grad(theta_.size());
  const Eigen::Index n = state_dim_, h = hidden_, a = action_dim_;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      grad.data(), h, n) = d_pre * state.transpose();
  grad.segment(h * n, h) = d_pre;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      grad.data() + h * n + h, a, h) = d_out * hidden.transpose();
  grad.tail(a) = d_out;
  return grad;
}

Eigen::VectorXd GaussianMlpPolicy::sample_action(const Eigen::VectorXd& state,
                                                 RngStream& rng) const {
  Eigen::VectorXd action = mean(state);
  for (Eigen::Index i = 0; i < action.size(); ++i) action(i) += sigma_ * rng.normal();
  return action;
}

// ---------------------------------------------------------------------------
// SoftmaxTabularPolicy

SoftmaxTabularPolicy::SoftmaxTabularPolicy(int num_states, int num_actions, Eigen::VectorXd theta)
    : Policy(std::move(theta)), num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("softmax-tabular needs positive state and action counts");
  if (theta_.size() != static_cast<Eigen::Index>(num_states) * num_actions)
    throw std::invalid_argument("softmax-tabular parameter vector has the wrong dimension");
}

SoftmaxTabularPolicy::SoftmaxTabularPolicy(int num_states, int num_actions)
    : SoftmaxTabularPolicy(num_states, num_actions,
                           Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_states) *
                                                 num_actions)) {}

std::unique_ptr<Policy> SoftmaxTabularPolicy::with_parameters(Eigen::VectorXd theta) const {
  return std::make_unique<SoftmaxTabularPolicy>(num_states_, num_actions_, std::move(theta));
}

int SoftmaxTabularPolicy::state_index(const Eigen::VectorXd& state) const {
  if (state.size() != 1) throw std::invalid_argument("tabular state must be a one-element vector");
  const auto s = static_cast<int>(std::lround(state(0)));
  if (s < 0 || s >= num_states_ || static_cast<double>(s) != state(0))
    throw std::invalid_argument("tabular state index out of range");
  return s;
}

int SoftmaxTabularPolicy::action_index(const Eigen::VectorXd& action) const {
  if (action.size() != 1) throw std::invalid_argument("tabular action must be a one-element vector");
  const auto a = static_cast<int>(std::lround(action(0)));
  if (a < 0 || a >= num_actions_ || static_cast<double>(a) != action(0))
    throw std::invalid_argument("tabular action index out of range");
  return a;
}

Eigen::VectorXd SoftmaxTabularPolicy::probabilities(int state) const {
  const Eigen::VectorXd logits =
      theta_.segment(static_cast<Eigen::Index>(state) * num_actions_, num_actions_);
  const Eigen::VectorXd shifted = (logits.array() - logits.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

double SoftmaxTabularPolicy::log_prob(const Eigen::VectorXd& state,
                                      const Eigen::VectorXd& action) const {
  const int s = state_index(state);
  const int a = action_index(action);
  const Eigen::VectorXd logits =
      theta_.segment(static_cast<Eigen::Index>(s) * num_actions_, num_actions_);
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  const double result = logits(a) - lse;
  if (!std::isfinite(result))
    throw std::domain_error("action " + std::to_string(a) + " has zero probability in state " +
                            std::to_string(s));
  return result;
}

Eigen::VectorXd SoftmaxTabularPolicy::score(const Eigen::VectorXd& state,
                                            const Eigen::VectorXd& action) const {
  const int s = state_index(state);
  const int a = action_index(action);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  const Eigen::Index offset = static_cast<Eigen::Index>(s) * num_actions_;
  grad.segment(offset, num_actions_) = -probabilities(s);
  grad(offset + a) += 1.0;
  return grad;
}

Eigen::VectorXd SoftmaxTabularPolicy::sample_action(const Eigen::VectorXd& state,
                                                    RngStream& rng) const {
  const Eigen::VectorXd p = probabilities(state_index(state));
  Eigen::VectorXd action(1);
  action(0) = static_cast<double>(rng.categorical({p.data(), static_cast<std::size_t>(p.size())}));
  return action;
}

// ---------------------------------------------------------------------------
// Bounds

Eigen::MatrixXd log_prob_hessian(const Policy& policy, const Eigen::VectorXd& state,
                                 const Eigen::VectorXd& action, double fd_step) {
  const Eigen::Index d = policy.dimension();
  Eigen::MatrixXd hessian(d, d);
  Eigen::VectorXd theta = policy.parameters();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double saved = theta(i);
    theta(i) = saved + fd_step;
    const Eigen::VectorXd plus = policy.with_parameters(theta)->score(state, action);
    theta(i) = saved - fd_step;
    const Eigen::VectorXd minus = policy.with_parameters(theta)->score(state, action);
    theta(i) = saved;
    hessian.col(i) = (plus - minus) / (2.0 * fd_step);
  }
  return 0.5 * (hessian + hessian.transpose());
}

ScoreBounds estimate_score_bounds(const Policy& policy, const StateActionSampler& sampler,
                                  int n_samples, std::uint64_t seed, double fd_step) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample for score bounds");
  RngStream rng(StreamDomain::Diagnostics, seed, 0, 0, 0);
  ScoreBounds bounds;
  for (int i = 0; i < n_samples; ++i) {
    const auto [state, action] = sampler(rng);
    bounds.G = std::max(bounds.G, policy.score(state, action).norm());
    const Eigen::MatrixXd hessian = log_prob_hessian(policy, state, action, fd_step);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
    bounds.M = std::max(bounds.M, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  if (!std::isfinite(bounds.G) || !std::isfinite(bounds.M))
    throw std::runtime_error("score bound estimate is not finite; check the state/action domain");
  return bounds;
}

}  // namespace svrpg
