#include "svrpg/adaptive_step.hpp"

#include <stdexcept>

namespace svrpg {

Eigen::VectorXd AdaptiveStep::step(const Eigen::VectorXd& grad, double eta) {
  if (grad.size() != accumulated_.size())
    throw std::invalid_argument("adaptive step: gradient dimension mismatch");
  accumulated_ += grad.cwiseAbs2();
  return (eta * grad.array() / (accumulated_.array().sqrt() + epsilon_)).matrix();
}

double AdaptiveStep::effective_rate(double eta) const {
  return (eta / (accumulated_.array().sqrt() + epsilon_)).mean();
}

}  // namespace svrpg
