#include "svrpg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "svrpg/rng.hpp"
#include "svrpg/rollout.hpp"

namespace svrpg {

TheoryConstants derive_constants(double G, double M, double R, int H, double gamma, double b,
                                 double W, double sigma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(G > 0.0) || !(M > 0.0) || !(R > 0.0) || H < 1)
    throw std::invalid_argument("G, M, R and H must be positive");
  if (!(W >= 0.0) || !(sigma >= 0.0)) throw std::invalid_argument("W and sigma must be non-negative");
  return TheoryConstants{G, M, R, H, gamma, b, W, sigma};
}

EpochCondition check_epoch_condition(int B, int m, const DerivedConstants& c) {
  if (B < 1 || m < 1) throw std::invalid_argument("B and m must be at least 1");
  EpochCondition out;
  out.lhs = static_cast<double>(B) / (static_cast<double>(m) * m);
  out.rhs = 3.0 * (c.C_omega * c.C_g * c.C_g + c.L_g * c.L_g) / (2.0 * c.L * c.L);
  out.margin = out.lhs / out.rhs;
  out.satisfied = out.lhs >= out.rhs;
  return out;
}

Schedule schedule(double epsilon, const TheoryConstants& constants, double c_N, double c_T) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("schedule needs epsilon > 0");
  if (!(c_N > 0.0) || !(c_T > 0.0)) throw std::invalid_argument("schedule prefactors must be positive");
  Schedule out;
  out.eta = 1.0 / (4.0 * constants.L());
  out.N = static_cast<int>(std::ceil(c_N / epsilon));
  out.B_unconstrained = static_cast<int>(std::ceil(std::pow(static_cast<double>(out.N), 2.0 / 3.0)));
  out.m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(out.B_unconstrained))));
  out.B = out.B_unconstrained;
  const DerivedConstants derived = constants.derived();
  if (!check_epoch_condition(out.B, out.m, derived).satisfied) {
    const double rhs = check_epoch_condition(out.B, out.m, derived).rhs;
    out.B = std::max(out.B, static_cast<int>(std::ceil(rhs * out.m * out.m)));
    // Guard against the product landing a hair under rhs after rounding.
    while (!check_epoch_condition(out.B, out.m, derived).satisfied) ++out.B;
  }
  out.S = static_cast<int>(std::ceil(c_T / (epsilon * out.m)));
  return out;
}

double theorem_bound(const TheoryConstants& constants, int S, int m, double eta, int N,
                     double J_gap) {
  if (S < 1 || m < 1 || N < 1 || !(eta > 0.0))
    throw std::invalid_argument("theorem bound needs positive S, m, N and eta");
  return 8.0 * J_gap / (eta * S * m) + 6.0 * constants.sigma * constants.sigma / N;
}

double renyi_d2_exact(const TabularMdp& mdp, const Policy& policy1, const Policy& policy2) {
  double d2 = 0.0;
  for_each_trajectory(mdp, policy1, [&](const Trajectory& t, double p1) {
    double log_p2 = 0.0;
    try {
      log_p2 = policy_log_density(t, policy2);
    } catch (const std::domain_error&) {
      throw std::domain_error("d2 undefined: p1 is not absolutely continuous with respect to p2");
    }
    d2 += p1 * std::exp(policy_log_density(t, policy1) - log_p2);
  });
  return d2;
}

WeightMoments importance_weight_moments(const TabularMdp& mdp, const Policy& reference,
                                        const Policy& current) {
  WeightMoments out;
  for_each_trajectory(mdp, current, [&](const Trajectory& t, double p) {
    const double log_ratio = policy_log_density(t, reference) - policy_log_density(t, current);
    const double w = std::exp(log_ratio);
    // expm1 keeps omega - 1 accurate when the two policies are very close.
    const double excess = std::expm1(log_ratio);
    out.mean += p * w;
    out.second_moment += p * w * w;
    out.variance += p * excess * excess;
  });
  return out;
}

std::vector<VarianceProfileRow> weight_variance_profile(const TabularMdp& mdp,
                                                        const Policy& policy,
                                                        const Eigen::VectorXd& direction,
                                                        std::span<const double> deltas) {
  if (direction.size() != policy.dimension())
    throw std::invalid_argument("direction dimension differs from the policy dimension");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("variance profile needs a unit direction");
  std::vector<VarianceProfileRow> rows;
  for (double delta : deltas) {
    const auto reference = policy.with_parameters(policy.parameters() + delta * direction);
    const WeightMoments moments = importance_weight_moments(mdp, *reference, policy);
    VarianceProfileRow row;
    row.delta = delta;
    row.variance = moments.variance;
    row.ratio = delta == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                             : moments.variance / (delta * delta);
    row.d2 = renyi_d2_exact(mdp, *reference, policy);
    rows.push_back(row);
  }
  return rows;
}

namespace {

Eigen::VectorXd random_offset(RngStream& rng, Eigen::Index d, double radius) {
  Eigen::VectorXd u(d);
  for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.normal();
  return u.normalized() * (radius * rng.uniform());
}

}  // namespace

double estimate_weight_variance_bound(const TabularMdp& mdp, const Policy& center, int probes,
                                      double radius, std::uint64_t seed) {
  double W = 0.0;
  for (int i = 0; i < probes; ++i) {
    RngStream rng(StreamDomain::Diagnostics, seed, 1, 0, static_cast<std::uint64_t>(i));
    const auto current = center.with_parameters(center.parameters() +
                                                random_offset(rng, center.dimension(), radius));
    const auto reference = center.with_parameters(current->parameters() +
                                                  random_offset(rng, center.dimension(), radius));
    W = std::max(W, importance_weight_moments(mdp, *reference, *current).variance);
  }
  return W;
}

double estimate_gradient_variance_bound(const TabularMdp& mdp, const Policy& center,
                                        const EstimatorParams& estimator, int probes,
                                        double radius, std::uint64_t seed) {
  double sigma2 = estimator_variance(mdp, center, estimator);
  for (int i = 0; i < probes; ++i) {
    RngStream rng(StreamDomain::Diagnostics, seed, 2, 0, static_cast<std::uint64_t>(i));
    const auto probe = center.with_parameters(center.parameters() +
                                              random_offset(rng, center.dimension(), radius));
    sigma2 = std::max(sigma2, estimator_variance(mdp, *probe, estimator));
  }
  return sigma2;
}

double optimal_value(const TabularMdp& mdp) {
  mdp.validate();
  std::vector<double> next(static_cast<std::size_t>(mdp.num_states), 0.0);
  std::vector<double> value(next.size(), 0.0);
  for (int h = mdp.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < mdp.num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        double q = mdp.reward(s, a);
        for (int n = 0; n < mdp.num_states; ++n)
          q += mdp.gamma * mdp.transition_prob(s, a, n) * next[static_cast<std::size_t>(n)];
        best = std::max(best, q);
      }
      value[static_cast<std::size_t>(s)] = best;
    }
    next = value;
  }
  double total = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) total += mdp.rho[static_cast<std::size_t>(s)] * next[static_cast<std::size_t>(s)];
  return total;
}

}  // namespace svrpg
