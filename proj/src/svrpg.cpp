#include "svrpg/svrpg.hpp"

#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "svrpg/adaptive_step.hpp"
#include "svrpg/rollout.hpp"

namespace svrpg {

ImportanceWeight importance_weight(const Trajectory& trajectory, const Policy& reference,
                                   const Policy& current, double log_cap) {
  double log_ratio = 0.0;
  for (std::size_t h = 0; h < trajectory.horizon(); ++h)
    log_ratio += reference.log_prob(trajectory.states[h], trajectory.actions[h]) -
                 current.log_prob(trajectory.states[h], trajectory.actions[h]);
  if (log_ratio > log_cap) return {std::exp(log_cap), true};
  return {std::exp(log_ratio), false};
}

SemiStochasticGradient semi_stochastic_grad(const Eigen::VectorXd& mu,
                                            std::span<const Trajectory> minibatch,
                                            const Policy& reference, const Policy& current,
                                            const EstimatorParams& estimator, double log_cap) {
  if (minibatch.empty()) throw std::invalid_argument("semi-stochastic gradient of an empty minibatch");
  std::vector<double> baselines;
  if (estimator.kind == EstimatorKind::Gpomdp && estimator.average_step_baseline)
    baselines = average_step_baselines(minibatch, estimator.gamma);

  SemiStochasticGradient out;
  std::vector<Eigen::VectorXd> corrections;
  corrections.reserve(minibatch.size());
  for (const auto& t : minibatch) {
    const ImportanceWeight w = importance_weight(t, reference, current, log_cap);
    if (w.clipped) ++out.clip_events;
    corrections.push_back(trajectory_grad(t, current, estimator, baselines) -
                          w.value * trajectory_grad(t, reference, estimator, baselines));
  }
  out.v = mu + pairwise_mean(corrections);
  return out;
}

void SvrpgConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("svrpg: epochs (S) must be >= 1");
  if (epoch_length < 1) throw std::invalid_argument("svrpg: epoch length (m) must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("svrpg: batch size (N) must be >= 1");
  if (minibatch_size < 1) throw std::invalid_argument("svrpg: mini-batch size (B) must be >= 1");
  if (!(step_size >= 0.0)) throw std::invalid_argument("svrpg: step size must be non-negative");
  if (inner_step_size && !(*inner_step_size >= 0.0))
    throw std::invalid_argument("svrpg: inner step size must be non-negative");
  if (horizon < 1) throw std::invalid_argument("svrpg: horizon must be >= 1");
  if (!(estimator.gamma > 0.0 && estimator.gamma < 1.0))
    throw std::invalid_argument("svrpg: gamma must lie in (0, 1)");
}

void GradientAscentConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("gradient ascent: iterations must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("gradient ascent: batch size must be >= 1");
  if (!(step_size >= 0.0)) throw std::invalid_argument("gradient ascent: step size must be non-negative");
  if (horizon < 1) throw std::invalid_argument("gradient ascent: horizon must be >= 1");
  if (!(estimator.gamma > 0.0 && estimator.gamma < 1.0))
    throw std::invalid_argument("gradient ascent: gamma must lie in (0, 1)");
}

namespace {

double mean_return(std::span<const Trajectory> batch) {
  double total = 0.0;
  for (const auto& t : batch) total += undiscounted_return(t);
  return total / static_cast<double>(batch.size());
}

// Collects rows and iterates for one optimizer run.
class Recorder {
 public:
  Recorder(const RunCallbacks& callbacks, std::uint64_t seed, bool keep_iterates)
      : callbacks_(callbacks), pick_rng_(StreamDomain::IteratePick, seed, 0, 0, 0),
        keep_iterates_(keep_iterates) {}

  void iterate(const Eigen::VectorXd& theta) {
    ++seen_;
    // Reservoir sampling of size one: the k-th iterate replaces the pick
    // with probability 1/k, so the final pick is uniform.
    if (seen_ == 1 || pick_rng_.uniform_index(seen_) == 0) result.uniform_iterate = theta;
    if (keep_iterates_) result.iterates.push_back(theta);
  }

  void initial_row(const Policy& policy) {
    if (!callbacks_.evaluate) return;
    IterationRecord r;
    r.avg_return = callbacks_.evaluate(policy);
    push(r, policy);
  }

  void row(IterationRecord r, const Policy& policy, std::span<const Trajectory> batch) {
    r.trajectories_consumed = result.trajectories_consumed;
    r.weight_clip_count = result.weight_clip_count;
    r.avg_return = callbacks_.evaluate ? callbacks_.evaluate(policy) : mean_return(batch);
    push(r, policy);
  }

  OptimizationResult result;

 private:
  void push(const IterationRecord& r, const Policy& policy) {
    result.metrics.rows.push_back(r);
    if (callbacks_.on_iteration) callbacks_.on_iteration(r, policy);
  }

  const RunCallbacks& callbacks_;
  RngStream pick_rng_;
  bool keep_iterates_;
  std::size_t seen_ = 0;
};

void require_finite(const Eigen::VectorXd& theta, int epoch, int iteration) {
  if (theta.allFinite()) return;
  std::ostringstream msg;
  msg << "non-finite parameters at epoch " << epoch << ", iteration " << iteration << ": theta = [";
  for (Eigen::Index i = 0; i < theta.size(); ++i) msg << (i ? ", " : "") << theta(i);
  msg << "]";
  throw std::runtime_error(msg.str());
}

bool over_budget(std::size_t budget, std::size_t consumed, int cost) {
  return budget > 0 && consumed + static_cast<std::size_t>(cost) > budget;
}

}  // namespace

OptimizationResult svrpg_run(const SvrpgConfig& config, const Environment& env,
                             const Policy& initial_policy, const RunCallbacks& callbacks) {
  config.validate();
  Recorder rec(callbacks, config.seed, config.record_iterates);
  std::unique_ptr<Policy> current = initial_policy.with_parameters(initial_policy.parameters());
  rec.initial_row(*current);

  AdaptiveStep outer_scaling(current->dimension());
  AdaptiveStep inner_scaling(current->dimension());
  const double eta = config.step_size;
  const double inner_eta = config.inner_eta();

  for (int s = 0; s < config.epochs; ++s) {
    if (over_budget(config.trajectory_budget, rec.result.trajectories_consumed, config.batch_size))
      break;
    std::unique_ptr<Policy> reference = current->with_parameters(current->parameters());
    rec.iterate(reference->parameters());

    const std::vector<Trajectory> snapshot_batch =
        sample_batch(env, *reference, config.horizon, static_cast<std::size_t>(config.batch_size),
                     BatchKey{StreamDomain::Train, config.seed, static_cast<std::uint64_t>(s), 0});
    const Eigen::VectorXd mu = batch_grad(snapshot_batch, *reference, config.estimator).grad;
    rec.result.trajectories_consumed += snapshot_batch.size();
    ++rec.result.epochs_run;

    Eigen::VectorXd outer_step =
        config.adaptive_step ? outer_scaling.step(mu, eta) : Eigen::VectorXd(eta * mu);
    const double outer_rate = config.adaptive_step ? outer_scaling.effective_rate(eta) : eta;
    // Fresh inner state per epoch; a run-long inner accumulator falls below
    // the outer rate after one step and the inner loop never gets going.
    inner_scaling = AdaptiveStep(current->dimension());
    if (config.initial_update) {
      Eigen::VectorXd theta = reference->parameters() + outer_step;
      require_finite(theta, s, 0);
      current = current->with_parameters(std::move(theta));
      rec.iterate(current->parameters());
    }
    rec.row(IterationRecord{.epoch = s, .iteration = 0, .grad_norm_proxy = mu.norm(),
                            .step_size = outer_rate},
            *current, snapshot_batch);

    bool budget_exhausted = false;
    for (int t = 0; t < config.epoch_length; ++t) {
      if (over_budget(config.trajectory_budget, rec.result.trajectories_consumed,
                      config.minibatch_size)) {
        budget_exhausted = true;
        break;
      }
      const std::vector<Trajectory> minibatch = sample_batch(
          env, *current, config.horizon, static_cast<std::size_t>(config.minibatch_size),
          BatchKey{StreamDomain::Train, config.seed, static_cast<std::uint64_t>(s),
                   static_cast<std::uint64_t>(t) + 1});
      const SemiStochasticGradient v = semi_stochastic_grad(
          mu, minibatch, *reference, *current, config.estimator, config.log_weight_cap);
      rec.result.trajectories_consumed += minibatch.size();
      rec.result.weight_clip_count += v.clip_events;
      ++rec.result.inner_steps;

      const Eigen::VectorXd step =
          config.adaptive_step ? inner_scaling.step(v.v, inner_eta) : Eigen::VectorXd(inner_eta * v.v);
      const double inner_rate =
          config.adaptive_step ? inner_scaling.effective_rate(inner_eta) : inner_eta;
      Eigen::VectorXd theta = current->parameters() + step;
      require_finite(theta, s, t + 1);
      current = current->with_parameters(std::move(theta));
      rec.iterate(current->parameters());
      rec.row(IterationRecord{.epoch = s, .iteration = t + 1, .grad_norm_proxy = v.v.norm(),
                              .step_size = inner_rate},
              *current, minibatch);
      if (config.adaptive_epoch && inner_rate < outer_rate) break;
    }
    if (budget_exhausted) break;
  }

  rec.result.final_parameters = current->parameters();
  if (rec.result.uniform_iterate.size() == 0) rec.result.uniform_iterate = current->parameters();
  return std::move(rec.result);
}

OptimizationResult gradient_ascent_run(const GradientAscentConfig& config, const Environment& env,
                                       const Policy& initial_policy,
                                       const RunCallbacks& callbacks) {
  config.validate();
  Recorder rec(callbacks, config.seed, config.record_iterates);
  std::unique_ptr<Policy> current = initial_policy.with_parameters(initial_policy.parameters());
  rec.initial_row(*current);
  rec.iterate(current->parameters());
  AdaptiveStep scaling(current->dimension());

  for (int k = 0; k < config.iterations; ++k) {
    if (over_budget(config.trajectory_budget, rec.result.trajectories_consumed, config.batch_size))
      break;
    const std::vector<Trajectory> batch =
        sample_batch(env, *current, config.horizon, static_cast<std::size_t>(config.batch_size),
                     BatchKey{StreamDomain::Train, config.seed, 0, static_cast<std::uint64_t>(k)});
    const Eigen::VectorXd grad = batch_grad(batch, *current, config.estimator).grad;
    rec.result.trajectories_consumed += batch.size();
    const Eigen::VectorXd step = config.adaptive_step ? scaling.step(grad, config.step_size)
                                                      : Eigen::VectorXd(config.step_size * grad);
    const double rate = config.adaptive_step ? scaling.effective_rate(config.step_size)
                                             : config.step_size;
    Eigen::VectorXd theta = current->parameters() + step;
    require_finite(theta, 0, k + 1);
    current = current->with_parameters(std::move(theta));
    rec.iterate(current->parameters());
    rec.row(IterationRecord{.epoch = 0, .iteration = k + 1, .grad_norm_proxy = grad.norm(),
                            .step_size = rate},
            *current, batch);
  }

  rec.result.final_parameters = current->parameters();
  return std::move(rec.result);
}

}  // namespace svrpg
