#ifndef SVRPG_DIAGNOSTICS_HPP
#define SVRPG_DIAGNOSTICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Core>

#include "svrpg/environment.hpp"
#include "svrpg/estimators.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/rng.hpp"
#include "svrpg/tabular_mdp.hpp"
#include "svrpg/theory.hpp"

namespace svrpg {

/// Entries i.i.d. Uniform(-scale, scale).
Eigen::VectorXd random_parameters(Eigen::Index dimension, double scale, RngStream& rng);

/// Uniformly distributed unit vector.
Eigen::VectorXd random_direction(Eigen::Index dimension, RngStream& rng);

/// ||a - b|| / max(||a||, ||b||, floor).
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-12);

/// Central differences of a scalar function of the parameters.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& theta, double step);

/// E[v | reference, current] by enumeration, with mu replaced by its
/// expectation E_{reference}[g(tau | reference)].
Eigen::VectorXd expected_semi_stochastic_grad(const TabularMdp& mdp, const Policy& reference,
                                              const Policy& current,
                                              const EstimatorParams& estimator);

/// Sampled check of ||g|| <= C_g and ||g(.|t1) - g(.|t2)|| <= L_g ||t1 - t2||
/// for a Gaussian-linear policy. G and M are measured over every (s, a)
/// visited by the sampled trajectories.
struct PropositionCheck {
  ScoreBounds bounds;
  double C_g = 0.0;
  double L_g = 0.0;
  std::size_t trajectories = 0;
  std::size_t pairs = 0;
  std::size_t norm_violations = 0;
  std::size_t lipschitz_violations = 0;
  double max_norm_ratio = 0.0;       // max ||g|| / C_g
  double max_lipschitz_ratio = 0.0;  // max ||dg|| / (L_g ||dtheta||)
};

PropositionCheck proposition_bound_check(const Environment& env,
                                         const GaussianLinearPolicy& policy, int horizon,
                                         const EstimatorParams& estimator,
                                         std::size_t n_trajectories, std::size_t n_pairs,
                                         std::uint64_t seed);

/// Full theory pipeline on a two-armed softmax bandit: constants (G, M from
/// the softmax sup, W and sigma^2 by enumeration over probe sets), the
/// epsilon schedule, plain SVRPG runs, and the exact squared gradient norm
/// at the uniformly drawn output iterate, averaged over seeds.
struct TheoremCheck {
  TheoryConstants constants;
  Schedule schedule;
  double J_gap = 0.0;
  double bound = 0.0;
  double mean_squared_grad = 0.0;
  int seeds = 0;
};

TheoremCheck theorem_bound_check(double epsilon, int seeds, std::uint64_t seed0);

/// Score-function sup bounds for a two-armed softmax over all parameters.
inline constexpr double kTwoArmSoftmaxG = 1.4142135623730951;  // sqrt(2)
inline constexpr double kTwoArmSoftmaxM = 0.5;

/// The bandit used by theorem_bound_check: rewards (1, 0), gamma 0.5.
TabularMdp theory_bandit();

/// Least-squares slope of log(total trajectories) against log(epsilon).
/// With inflated = false the count uses B before the epoch-condition fix.
double schedule_log_log_slope(const TheoryConstants& constants, std::span<const double> epsilons,
                              double c_N = 1.0, double c_T = 1.0, bool inflated = true);

}  // namespace svrpg

#endif  // SVRPG_DIAGNOSTICS_HPP
