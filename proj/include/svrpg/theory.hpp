#ifndef SVRPG_THEORY_HPP
#define SVRPG_THEORY_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "svrpg/estimators.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/tabular_mdp.hpp"

namespace svrpg {

/// Smoothness constants derived from the problem constants.
struct DerivedConstants {
  double L = 0.0;        // smoothness of J
  double L_g = 0.0;      // Lipschitz constant of g(tau | .)
  double C_g = 0.0;      // bound on ||g(tau | theta)||
  double C_omega = 0.0;  // importance-weight variance growth
};

/// Problem constants. Derived quantities are recomputed from these fields
/// on every read, so they cannot drift out of sync.
struct TheoryConstants {
  double G = 0.0;      // sup ||grad log pi||
  double M = 0.0;      // sup ||hess log pi||_2
  double R = 0.0;      // reward bound
  int H = 1;           // horizon
  double gamma = 0.0;  // discount
  double b = 0.0;      // baseline magnitude
  double W = 0.0;      // bound on Var(omega)
  double sigma = 0.0;  // bound on the estimator standard deviation

  /// H R (M + H G^2) / (1 - gamma)
  double L() const { return H * R * (M + H * G * G) / (1.0 - gamma); }
  /// H M (R + |b|) / (1 - gamma)
  double L_g() const { return H * M * (R + std::abs(b)) / (1.0 - gamma); }
  /// H G (R + |b|) / (1 - gamma)
  double C_g() const { return H * G * (R + std::abs(b)) / (1.0 - gamma); }
  /// H (2 H G^2 + M) (W + 1)
  double C_omega() const { return H * (2.0 * H * G * G + M) * (W + 1.0); }

  DerivedConstants derived() const { return {L(), L_g(), C_g(), C_omega()}; }
};

/// Validates inputs (gamma in (0,1), G, M, R, H > 0, b, W, sigma >= 0) and
/// packs them. Throws std::invalid_argument otherwise.
TheoryConstants derive_constants(double G, double M, double R, int H, double gamma, double b,
                                 double W, double sigma);

struct EpochCondition {
  bool satisfied = false;
  double lhs = 0.0;     // B / m^2
  double rhs = 0.0;     // 3 (C_omega C_g^2 + L_g^2) / (2 L^2)
  double margin = 0.0;  // lhs / rhs
};

EpochCondition check_epoch_condition(int B, int m, const DerivedConstants& constants);
inline EpochCondition check_epoch_condition(int B, int m, const TheoryConstants& constants) {
  return check_epoch_condition(B, m, constants.derived());
}

struct Schedule {
  int N = 1;
  int B = 1;
  int m = 1;
  int S = 1;
  double eta = 0.0;
  /// B before inflation for the epoch condition.
  int B_unconstrained = 1;

  /// S N + S m B
  long long total_trajectories() const {
    return static_cast<long long>(S) * N + static_cast<long long>(S) * m * B;
  }
  /// Same count with B_unconstrained in place of B.
  long long unconstrained_trajectories() const {
    return static_cast<long long>(S) * N + static_cast<long long>(S) * m * B_unconstrained;
  }
};

/// eta = 1/(4L), N = ceil(c_N / eps), B = ceil(N^(2/3)), m = ceil(sqrt(B)),
/// then B raised to the smallest value meeting the epoch condition for that
/// m, and S = ceil(c_T / (eps m)). Throws std::invalid_argument for eps <= 0.
Schedule schedule(double epsilon, const TheoryConstants& constants, double c_N = 1.0,
                  double c_T = 1.0);

/// 8 (J* - J(theta_0)) / (eta S m) + 6 sigma^2 / N
double theorem_bound(const TheoryConstants& constants, int S, int m, double eta, int N,
                     double J_gap);

/// d_2(p1 || p2) = sum_tau p1(tau)^2 / p2(tau) over trajectory distributions.
/// Throws std::domain_error where p1 > 0 but p2 = 0.
double renyi_d2_exact(const TabularMdp& mdp, const Policy& policy1, const Policy& policy2);

/// Exact moments of omega(tau | reference, current) for tau ~ p(. | current).
struct WeightMoments {
  double mean = 0.0;           // E[omega]
  double second_moment = 0.0;  // E[omega^2]
  double variance = 0.0;       // E[(omega - 1)^2]
};

WeightMoments importance_weight_moments(const TabularMdp& mdp, const Policy& reference,
                                        const Policy& current);

struct VarianceProfileRow {
  double delta = 0.0;
  double variance = 0.0;  // Var(omega) at reference = current + delta u
  double ratio = 0.0;     // variance / delta^2 (NaN at delta = 0)
  double d2 = 0.0;        // renyi_d2_exact(reference || current)
};

/// Exact Var(omega(tau | theta + delta u, theta)) for each delta.
std::vector<VarianceProfileRow> weight_variance_profile(const TabularMdp& mdp,
                                                        const Policy& policy,
                                                        const Eigen::VectorXd& direction,
                                                        std::span<const double> deltas);

/// W: maximum exact Var(omega) over `probes` random policy pairs with
/// ||theta_ref - theta_cur|| <= radius around `center`.
double estimate_weight_variance_bound(const TabularMdp& mdp, const Policy& center, int probes,
                                      double radius, std::uint64_t seed);

/// sigma^2: maximum exact trace-covariance of g(tau | theta) over `probes`
/// random theta with ||theta - center|| <= radius (the center included).
double estimate_gradient_variance_bound(const TabularMdp& mdp, const Policy& center,
                                        const EstimatorParams& estimator, int probes,
                                        double radius, std::uint64_t seed);

/// Finite-horizon optimal expected discounted return by backward induction.
/// Upper-bounds J(theta) for every stationary policy; exact for H = 1.
double optimal_value(const TabularMdp& mdp);

}  // namespace svrpg

#endif  // SVRPG_THEORY_HPP
