#include "svrpg/check_suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string_view>

#include "svrpg/diagnostics.hpp"
#include "svrpg/estimators.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/rollout.hpp"
#include "svrpg/tabular_mdp.hpp"

namespace svrpg {
namespace {

class Recorder {
 public:
  explicit Recorder(CheckReport& report) : report_(report) {}

  // Records a "residual <= tolerance" check.
  void bound(std::string_view name, double residual, double tolerance, nlohmann::json extra = {}) {
    const bool ok = std::isfinite(residual) && residual <= tolerance;
    nlohmann::json entry = {{"name", name}, {"residual", residual},
                            {"tolerance", tolerance}, {"passed", ok}};
    if (!extra.is_null()) entry["details"] = std::move(extra);
    push(name, ok, std::move(entry));
  }

  void flag(std::string_view name, bool ok, nlohmann::json details) {
    push(name, ok, {{"name", name}, {"passed", ok}, {"details", std::move(details)}});
  }

 private:
  void push(std::string_view name, bool ok, nlohmann::json entry) {
    report_.json["checks"].push_back(std::move(entry));
    if (!ok) {
      report_.passed = false;
      report_.failures.emplace_back(name);
    }
  }

  CheckReport& report_;
};

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

CheckReport check_suite(const CheckOptions& options) {
  CheckReport report;
  report.json["checks"] = nlohmann::json::array();
  Recorder rec(report);

  const TabularMdp mdp = default_oracle_mdp();
  RngStream rng(StreamDomain::Diagnostics, options.seed, 0, 0, 0);
  const auto random_policy = [&](double scale = 1.0) {
    return SoftmaxTabularPolicy(mdp.num_states, mdp.num_actions,
                                random_parameters(mdp.num_states * mdp.num_actions, scale, rng));
  };

  // Enumeration sums to one.
  {
    double worst = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      double total = 0.0;
      for_each_trajectory(mdp, random_policy(), [&](const Trajectory&, double p) { total += p; });
      worst = std::max(worst, std::abs(total - 1.0));
    }
    rec.bound("enumeration_normalization", worst, 1e-12);
  }

  // Estimators are unbiased for the exact gradient.
  {
    double worst = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      const SoftmaxTabularPolicy policy = random_policy();
      const Eigen::VectorXd exact = exact_grad(mdp, policy).grad;
      for (const EstimatorParams& params :
           {EstimatorParams{EstimatorKind::Reinforce, mdp.gamma, 0.0, false},
            EstimatorParams{EstimatorKind::Reinforce, mdp.gamma, 0.5, false},
            EstimatorParams{EstimatorKind::Gpomdp, mdp.gamma, 0.0, false}}) {
        worst = std::max(worst, max_abs(expected_estimator(mdp, policy, params) - exact));
      }
    }
    rec.bound("estimator_unbiasedness", worst, 1e-10);
  }

  // Exact gradient against central differences of J, and scores against
  // central differences of log pi for every policy family.
  {
    double worst = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      const SoftmaxTabularPolicy policy = random_policy();
      const Eigen::VectorXd fd = central_difference(
          [&](const Eigen::VectorXd& theta) {
            return exact_grad(mdp, SoftmaxTabularPolicy(mdp.num_states, mdp.num_actions, theta))
                .value;
          },
          policy.parameters(), 1e-5);
      worst = std::max(worst, relative_error(exact_grad(mdp, policy).grad, fd));
    }
    rec.bound("exact_gradient_finite_difference", worst, 1e-5);

    const GaussianLinearPolicy linear(4, 1, 0.7, 10.0, random_parameters(5, 0.5, rng));
    const GaussianMlpPolicy mlp(4, 2, 5, 0.6, random_parameters(GaussianMlpPolicy::parameter_count(4, 2, 5), 0.5, rng));
    const SoftmaxTabularPolicy softmax = random_policy();
    double score_worst = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      const auto check = [&](const Policy& policy, const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
        const Eigen::VectorXd fd = central_difference(
            [&](const Eigen::VectorXd& theta) { return policy.with_parameters(theta)->log_prob(s, a); },
            policy.parameters(), 1e-5);
        score_worst = std::max(score_worst, relative_error(policy.score(s, a), fd));
      };
      check(linear, random_parameters(4, 1.0, rng), random_parameters(1, 1.0, rng));
      check(mlp, random_parameters(4, 1.0, rng), random_parameters(2, 1.0, rng));
      Eigen::VectorXd s(1), a(1);
      s(0) = static_cast<double>(rng.uniform_index(mdp.num_states));
      a(0) = static_cast<double>(rng.uniform_index(mdp.num_actions));
      check(softmax, s, a);
    }
    rec.bound("score_finite_difference", score_worst, 1e-5);
  }

  // Importance weight identities.
  {
    double mean_res = 0.0, second_res = 0.0, var_res = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      const SoftmaxTabularPolicy reference = random_policy();
      const SoftmaxTabularPolicy current = random_policy();
      const WeightMoments moments = importance_weight_moments(mdp, reference, current);
      const double d2 = renyi_d2_exact(mdp, reference, current);
      mean_res = std::max(mean_res, std::abs(moments.mean - 1.0));
      second_res = std::max(second_res, std::abs(moments.second_moment - d2));
      var_res = std::max(var_res, std::abs(moments.variance - (d2 - 1.0)));
    }
    rec.bound("weight_mean_is_one", mean_res, 1e-10);
    rec.bound("weight_second_moment_is_d2", second_res, 1e-10);
    rec.bound("weight_variance_is_d2_minus_one", var_res, 1e-10);
  }

  // Quadratic growth of Var(omega) near zero.
  {
    const SoftmaxTabularPolicy policy = random_policy();
    const std::array<double, 4> deltas{0.0, 1e-1, 1e-2, 1e-3};
    double worst = 0.0;
    nlohmann::json tables = nlohmann::json::array();
    for (int i = 0; i < options.random_points; ++i) {
      const Eigen::VectorXd u = random_direction(policy.dimension(), rng);
      const auto rows = weight_variance_profile(mdp, policy, u, deltas);
      worst = std::max(worst, std::abs(rows[2].ratio / rows[3].ratio - 1.0));
      if (i == 0) {
        for (const auto& r : rows) {
          tables.push_back({{"delta", r.delta},
                            {"variance", r.variance},
                            {"ratio", std::isnan(r.ratio) ? nlohmann::json() : nlohmann::json(r.ratio)},
                            {"d2", r.d2}});
        }
      }
    }
    report.json["variance_profile"] = tables;
    rec.bound("weight_variance_quadratic", worst, 0.2);
  }

  // Semi-stochastic gradient is unbiased for grad J at the current point.
  {
    double worst = 0.0;
    for (int i = 0; i < options.random_points; ++i) {
      const SoftmaxTabularPolicy reference = random_policy();
      const SoftmaxTabularPolicy current = random_policy();
      const Eigen::VectorXd exact = exact_grad(mdp, current).grad;
      for (EstimatorKind kind : {EstimatorKind::Reinforce, EstimatorKind::Gpomdp}) {
        const EstimatorParams params{kind, mdp.gamma, 0.0, false};
        worst = std::max(worst,
                         max_abs(expected_semi_stochastic_grad(mdp, reference, current, params) - exact));
      }
    }
    rec.bound("semi_stochastic_unbiasedness", worst, 1e-10);
  }

  // Constants and the epoch condition on a hand-computed example.
  {
    const TheoryConstants c = derive_constants(1.0, 1.0, 1.0, 10, 0.9, 0.0, 0.0, 0.0);
    const DerivedConstants d = options.derive(c);
    const double expected_rhs = 3.0 * (210.0 * 1e4 + 1e4) / (2.0 * 1100.0 * 1100.0);
    const EpochCondition cond = check_epoch_condition(27, 3, d);
    report.json["constants"] = {{"G", c.G}, {"M", c.M}, {"R", c.R}, {"H", c.H}, {"gamma", c.gamma},
                                {"L", d.L}, {"L_g", d.L_g}, {"C_g", d.C_g}, {"C_omega", d.C_omega}};
    const double const_res = std::max({std::abs(d.L - 1100.0), std::abs(d.C_g - 100.0),
                                       std::abs(d.L_g - 100.0), std::abs(d.C_omega - 210.0)});
    rec.bound("constants_example", const_res, 1e-9);
    rec.bound("epoch_condition_margin", std::abs(cond.margin - 3.0 / expected_rhs), 1e-9,
              {{"B", 27}, {"m", 3}, {"lhs", cond.lhs}, {"rhs", cond.rhs},
               {"margin", cond.margin}, {"satisfied", cond.satisfied}});
  }

  // Schedule: ceilings, epoch condition after inflation, log-log slope.
  {
    const TabularMdp bandit = theory_bandit();
    const TheoryConstants c = derive_constants(kTwoArmSoftmaxG, kTwoArmSoftmaxM, bandit.max_reward(),
                                               bandit.horizon, bandit.gamma, 0.0, 1.0, 1.0);
    const Schedule s = schedule(0.01, c);
    rec.flag("schedule_ceilings", s.N == 100 && s.B_unconstrained == 22 && s.m == 5,
             {{"N", s.N}, {"B_unconstrained", s.B_unconstrained}, {"m", s.m}});
    const std::array<double, 4> grid{0.1, 0.05, 0.02, 0.01};
    bool all_satisfied = true;
    nlohmann::json rows = nlohmann::json::array();
    for (double eps : grid) {
      const Schedule g = schedule(eps, c);
      const EpochCondition cond = check_epoch_condition(g.B, g.m, c);
      all_satisfied = all_satisfied && cond.satisfied;
      rows.push_back({{"epsilon", eps}, {"N", g.N}, {"B", g.B}, {"m", g.m}, {"S", g.S},
                      {"eta", g.eta}, {"total", g.total_trajectories()}, {"margin", cond.margin}});
    }
    report.json["schedule"] = rows;
    rec.flag("schedule_epoch_condition", all_satisfied, {{"grid", rows.size()}});
    // The inflated budget is reported only: at c_N = 1 the inflation floor
    // flattens the curve at the coarse end of the grid.
    const double slope = schedule_log_log_slope(c, grid, 1.0, 1.0, false);
    report.json["schedule_slope_inflated"] = schedule_log_log_slope(c, grid);
    rec.bound("schedule_slope", std::abs(slope + 5.0 / 3.0), 0.15, {{"slope", slope}});
  }

  // Theorem bound on the bandit.
  {
    const TheoremCheck t = theorem_bound_check(0.05, options.theorem_seeds, options.seed);
    rec.flag("theorem_bound", t.mean_squared_grad <= t.bound,
             {{"mean_squared_grad", t.mean_squared_grad}, {"bound", t.bound}, {"seeds", t.seeds},
              {"W", t.constants.W}, {"sigma2", t.constants.sigma * t.constants.sigma},
              {"J_gap", t.J_gap}, {"S", t.schedule.S}, {"m", t.schedule.m},
              {"N", t.schedule.N}, {"B", t.schedule.B}, {"eta", t.schedule.eta}});
  }

  report.json["passed"] = report.passed;
  report.json["failures"] = report.failures;
  return report;
}

}  // namespace svrpg
