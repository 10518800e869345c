#ifndef SVRPG_SVRPG_HPP
#define SVRPG_SVRPG_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "svrpg/environment.hpp"
#include "svrpg/estimators.hpp"
#include "svrpg/metrics.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/trajectory.hpp"

namespace svrpg {

/// Default cap on log omega: weights above 1e6 are clipped (and counted).
inline const double kDefaultLogWeightCap = std::log(1e6);

struct ImportanceWeight {
  double value = 1.0;
  bool clipped = false;
};

/// omega(tau | ref, cur) = p(tau | ref) / p(tau | cur), evaluated as the
/// exponential of the summed per-step policy log-ratios (environment
/// factors cancel). Log-ratios above log_cap are clipped to log_cap.
ImportanceWeight importance_weight(const Trajectory& trajectory, const Policy& reference,
                                   const Policy& current, double log_cap = kDefaultLogWeightCap);

struct SemiStochasticGradient {
  Eigen::VectorXd v;
  std::size_t clip_events = 0;
};

/// v = mu + (1/B) sum_j [g(tau_j | cur) - omega(tau_j | ref, cur) g(tau_j | ref)]
/// for a minibatch sampled under `current`. Throws std::invalid_argument on
/// an empty minibatch.
SemiStochasticGradient semi_stochastic_grad(const Eigen::VectorXd& mu,
                                            std::span<const Trajectory> minibatch,
                                            const Policy& reference, const Policy& current,
                                            const EstimatorParams& estimator,
                                            double log_cap = kDefaultLogWeightCap);

struct SvrpgConfig {
  int epochs = 1;                 // S
  int epoch_length = 1;           // m
  double step_size = 0.01;        // eta
  /// Step size for inner updates; defaults to step_size.
  std::optional<double> inner_step_size;
  int batch_size = 10;            // N
  int minibatch_size = 5;         // B
  EstimatorParams estimator;
  int horizon = 100;
  bool initial_update = false;
  bool adaptive_step = false;
  bool adaptive_epoch = false;
  double log_weight_cap = kDefaultLogWeightCap;
  std::uint64_t seed = 0;
  /// When positive, stop before any batch that would exceed this many
  /// trajectories; `epochs` is then only an upper limit.
  std::size_t trajectory_budget = 0;
  bool record_iterates = false;

  double inner_eta() const { return inner_step_size.value_or(step_size); }
  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Stochastic variance-reduced policy gradient.
///
/// Each epoch snapshots theta_ref = theta, estimates mu from N trajectories
/// under theta_ref, then performs up to m ascent steps along the
/// semi-stochastic gradient built from B fresh trajectories per step.
/// Practical variants (all off by default):
///  - initial_update: theta <- theta_ref + step(mu) before the inner loop;
///  - adaptive_step: AdaptiveStep scaling, with separate accumulators for
///    outer and inner updates (the inner one restarts every epoch);
///  - adaptive_epoch: leave the inner loop once the inner effective rate
///    falls below the outer one.
/// Throws std::runtime_error with a parameter dump if theta becomes non-finite.
OptimizationResult svrpg_run(const SvrpgConfig& config, const Environment& env,
                             const Policy& initial_policy, const RunCallbacks& callbacks = {});

/// Plain stochastic policy-gradient ascent with batch size N.
struct GradientAscentConfig {
  int iterations = 100;
  double step_size = 0.01;
  int batch_size = 10;
  EstimatorParams estimator;
  int horizon = 100;
  bool adaptive_step = false;
  std::uint64_t seed = 0;
  std::size_t trajectory_budget = 0;
  bool record_iterates = false;

  void validate() const;
};

OptimizationResult gradient_ascent_run(const GradientAscentConfig& config, const Environment& env,
                                       const Policy& initial_policy,
                                       const RunCallbacks& callbacks = {});

}  // namespace svrpg

#endif  // SVRPG_SVRPG_HPP
