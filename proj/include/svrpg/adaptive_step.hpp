#ifndef SVRPG_ADAPTIVE_STEP_HPP
#define SVRPG_ADAPTIVE_STEP_HPP

#include <Eigen/Core>

namespace svrpg {

/// Per-parameter accumulated-squared-gradient step scaling:
/// step_i = eta * g_i / (sqrt(sum of g_i^2 so far) + epsilon).
class AdaptiveStep {
 public:
  explicit AdaptiveStep(Eigen::Index dimension, double epsilon = 1e-8)
      : accumulated_(Eigen::VectorXd::Zero(dimension)), epsilon_(epsilon) {}

  /// Accumulates grad and returns the scaled ascent step.
  Eigen::VectorXd step(const Eigen::VectorXd& grad, double eta);

  /// Mean per-parameter rate eta / (sqrt(accumulated) + epsilon) under the
  /// current accumulator.
  double effective_rate(double eta) const;

  const Eigen::VectorXd& accumulated() const { return accumulated_; }

 private:
  Eigen::VectorXd accumulated_;
  double epsilon_;
};

}  // namespace svrpg

#endif  // SVRPG_ADAPTIVE_STEP_HPP
