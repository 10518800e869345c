// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svrpg/diagnostics.hpp"
#include "svrpg/environment.hpp"
#include "svrpg/estimators.hpp"
#include "svrpg/harness.hpp"
#include "svrpg/rollout.hpp"
#include "svrpg/svrpg.hpp"
#include "svrpg/theory.hpp"

namespace fs = std::filesystem;
using namespace svrpg;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string fmt_median(const std::optional<double>& m) { return m ? fmt(*m) : "not reached"; }

fs::path out_dir(const std::string& name) {
  const fs::path dir = fs::path(SVRPG_ACCEPTANCE_OUT) / name;
  fs::remove_all(dir);
  return dir;
}

RunConfig preset(const std::string& name, const std::string& run_dir) {
  RunConfig c = RunConfig::load(fs::path(SVRPG_CONFIG_DIR) / name);
  c.output_dir = out_dir(run_dir);
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const TabularMdp& oracle() {
  static const TabularMdp mdp = default_oracle_mdp();
  return mdp;
}

SoftmaxTabularPolicy random_softmax(RngStream& rng) {
  return SoftmaxTabularPolicy(oracle().num_states, oracle().num_actions,
                              random_parameters(oracle().num_states * oracle().num_actions, 1.0, rng));
}

// 1. Enumeration-weighted estimator mean equals the exact gradient.
Outcome estimator_unbiasedness() {
  RngStream rng(StreamDomain::Diagnostics, 101, 0, 0, 0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SoftmaxTabularPolicy policy = random_softmax(rng);
    const Eigen::VectorXd exact = exact_grad(oracle(), policy).grad;
    for (const EstimatorParams& p : {EstimatorParams{EstimatorKind::Reinforce, oracle().gamma, 0.0, false},
                                     EstimatorParams{EstimatorKind::Reinforce, oracle().gamma, 0.5, false},
                                     EstimatorParams{EstimatorKind::Gpomdp, oracle().gamma, 0.0, false}}) {
      worst = std::max(worst, (expected_estimator(oracle(), policy, p) - exact).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, "max componentwise error " + fmt(worst) + " (tol 1e-10, 20 theta x 3 estimators)"};
}

// 2. E[omega] = 1 and E[omega^2] = d2 by enumeration.
Outcome weight_identities() {
  RngStream rng(StreamDomain::Diagnostics, 102, 0, 0, 0);
  double mean_err = 0.0, second_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SoftmaxTabularPolicy ref = random_softmax(rng);
    const SoftmaxTabularPolicy cur = random_softmax(rng);
    double mean = 0.0, second = 0.0;
    for (const auto& w : enumerate_trajectories(oracle(), cur)) {
      const double omega =
          importance_weight(w.trajectory, ref, cur, std::numeric_limits<double>::infinity()).value;
      mean += w.probability * omega;
      second += w.probability * omega * omega;
    }
    mean_err = std::max(mean_err, std::abs(mean - 1.0));
    second_err = std::max(second_err, std::abs(second - renyi_d2_exact(oracle(), ref, cur)));
  }
  return {mean_err <= 1e-10 && second_err <= 1e-10,
          "|E[w]-1| " + fmt(mean_err) + ", |E[w^2]-d2| " + fmt(second_err) + " (tol 1e-10, 20 pairs)"};
}

// 3. Var(omega) / delta^2 is flat between 1e-2 and 1e-3.
Outcome quadratic_variance() {
  RngStream rng(StreamDomain::Diagnostics, 103, 0, 0, 0);
  const SoftmaxTabularPolicy policy = random_softmax(rng);
  const std::array<double, 2> deltas{1e-2, 1e-3};
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto rows = weight_variance_profile(oracle(), policy, random_direction(policy.dimension(), rng), deltas);
    worst = std::max(worst, std::abs(rows[0].ratio / rows[1].ratio - 1.0));
  }
  return {worst <= 0.2, "max |ratio(1e-2)/ratio(1e-3) - 1| " + fmt(worst) + " (tol 0.2, 10 directions)"};
}

// 4. E[v | ref, cur] = grad J(cur).
Outcome semi_stochastic_unbiasedness() {
  RngStream rng(StreamDomain::Diagnostics, 104, 0, 0, 0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const SoftmaxTabularPolicy ref = random_softmax(rng);
    const SoftmaxTabularPolicy cur = random_softmax(rng);
    const Eigen::VectorXd exact = exact_grad(oracle(), cur).grad;
    for (EstimatorKind kind : {EstimatorKind::Reinforce, EstimatorKind::Gpomdp}) {
      const Eigen::VectorXd ev =
          expected_semi_stochastic_grad(oracle(), ref, cur, {kind, oracle().gamma, 0.0, false});
      worst = std::max(worst, (ev - exact).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, "max componentwise error " + fmt(worst) + " (tol 1e-10, 10 pairs)"};
}

// 5. Scores and expected gradients against central differences.
Outcome gradient_correctness() {
  RngStream rng(StreamDomain::Diagnostics, 105, 0, 0, 0);
  const double h = 1e-5;
  double score_err = 0.0, grad_err = 0.0;

  const GaussianLinearPolicy linear(4, 1, 0.8, 10.0, random_parameters(5, 0.5, rng));
  const GaussianMlpPolicy mlp = GaussianMlpPolicy::initialized(4, 1, 8, 0.8, 5);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd s = random_parameters(4, 1.0, rng);
    const Eigen::VectorXd a = random_parameters(1, 1.0, rng);
    for (const Policy* p : {static_cast<const Policy*>(&linear), static_cast<const Policy*>(&mlp)}) {
      const Eigen::VectorXd fd = central_difference(
          [&](const Eigen::VectorXd& t) { return p->with_parameters(t)->log_prob(s, a); }, p->parameters(), h);
      score_err = std::max(score_err, relative_error(p->score(s, a), fd));
    }
    const SoftmaxTabularPolicy softmax = random_softmax(rng);
    Eigen::VectorXd ss(1), aa(1);
    ss(0) = static_cast<double>(rng.uniform_index(3));
    aa(0) = static_cast<double>(rng.uniform_index(2));
    const Eigen::VectorXd fd = central_difference(
        [&](const Eigen::VectorXd& t) { return softmax.with_parameters(t)->log_prob(ss, aa); },
        softmax.parameters(), h);
    score_err = std::max(score_err, relative_error(softmax.score(ss, aa), fd));
  }
  for (int i = 0; i < 10; ++i) {
    const SoftmaxTabularPolicy policy = random_softmax(rng);
    const Eigen::VectorXd fd = central_difference(
        [&](const Eigen::VectorXd& t) { return exact_grad(oracle(), SoftmaxTabularPolicy(3, 2, t)).value; },
        policy.parameters(), h);
    for (EstimatorKind kind : {EstimatorKind::Reinforce, EstimatorKind::Gpomdp})
      grad_err = std::max(grad_err,
                          relative_error(expected_estimator(oracle(), policy, {kind, oracle().gamma, 0.0, false}), fd));
  }
  return {score_err < 1e-5 && grad_err < 1e-5,
          "score rel err " + fmt(score_err) + ", estimator-vs-FD(J) rel err " + fmt(grad_err) + " (tol 1e-5)"};
}

TheoremCheck& theorem_result() {
  static TheoremCheck t = theorem_bound_check(0.05, 50, 2024);
  return t;
}

// 6. Mean ||grad J(theta_out)||^2 over 50 seeds stays under the bound.
Outcome theorem_bound_holds() {
  const TheoremCheck& t = theorem_result();
  return {t.mean_squared_grad <= t.bound,
          "mean ||grad J||^2 " + fmt(t.mean_squared_grad) + " <= bound " + fmt(t.bound) + " (S=" +
              std::to_string(t.schedule.S) + " m=" + std::to_string(t.schedule.m) + " N=" +
              std::to_string(t.schedule.N) + " B=" + std::to_string(t.schedule.B) + " eta=" +
              fmt(t.schedule.eta) + " W=" + fmt(t.constants.W) + " sigma^2=" +
              fmt(t.constants.sigma * t.constants.sigma) + " J_gap=" + fmt(t.J_gap) + ")"};
}

// 7. Log-log slope of the scheduled budget over the epsilon grid.
Outcome sample_complexity_slope() {
  const TheoryConstants& c = theorem_result().constants;
  const std::array<double, 4> grid{0.1, 0.05, 0.02, 0.01};
  const double slope = schedule_log_log_slope(c, grid);
  std::string detail = "slope " + fmt(slope) + " (target -1.667 +- 0.15; c_N = c_T = 1); before B inflation " +
                       fmt(schedule_log_log_slope(c, grid, 1.0, 1.0, false)) + "; with c_N = 2, 5, 10:";
  for (double c_N : {2.0, 5.0, 10.0}) detail += " " + fmt(schedule_log_log_slope(c, grid, c_N));
  return {std::abs(slope + 5.0 / 3.0) <= 0.15, detail};
}

// 8. SVRPG reaches the threshold with fewer trajectories than GPOMDP.
Outcome cartpole_comparison() {
  const ExperimentResult svrpg = run_experiment(preset("cartpole_svrpg.json", "cartpole_methods"));
  const ExperimentResult gpomdp = run_experiment(preset("cartpole_gpomdp.json", "cartpole_methods"));
  const double inf = std::numeric_limits<double>::infinity();
  const double a = svrpg.median_trajectories_to_threshold.value_or(inf);
  const double b = gpomdp.median_trajectories_to_threshold.value_or(inf);
  return {std::isfinite(a) && a < b,
          "median trajectories to " + fmt(svrpg.config.threshold) + ": svrpg " +
              fmt_median(svrpg.median_trajectories_to_threshold) + " vs gpomdp " +
              fmt_median(gpomdp.median_trajectories_to_threshold) + " (10 seeds, budget " +
              std::to_string(svrpg.config.budget) + ")"};
}

// Two-sided Mann-Whitney U test (normal approximation with tie and
// continuity corrections). Unreached runs are +inf and tie with each other.
double mann_whitney_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, int>> all;
  for (double v : x) all.emplace_back(v, 0);
  for (double v : y) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());
  const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  double rank_sum_x = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_sum_x += avg_rank;
    i = j;
  }
  const double u = rank_sum_x - n1 * (n1 + 1) / 2;
  const double mean = n1 * n2 / 2;
  const double var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

// 9. B = 10 is best or statistically tied-best in the minibatch sweep.
Outcome cartpole_sweep() {
  RunConfig base = preset("cartpole_sweep.json", "cartpole_sweep");
  const std::vector<int> Bs{5, 10, 20};
  const std::vector<double> etas{0.01, 0.02, 0.03};
  const SweepResult sweep = sweep_minibatch(base, Bs, etas);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> hits;
  std::vector<double> medians;
  for (const auto& e : sweep.entries) {
    std::vector<double> h;
    for (const auto& run : e.result.runs)
      h.push_back(run.summary.trajectories_to_threshold ? static_cast<double>(*run.summary.trajectories_to_threshold) : inf);
    hits.push_back(h);
    medians.push_back(e.result.median_trajectories_to_threshold.value_or(inf));
  }
  bool ok = std::isfinite(medians[1]);
  std::string detail = "medians B=5/10/20: ";
  for (std::size_t i = 0; i < 3; ++i)
    detail += (i ? " / " : "") + fmt_median(sweep.entries[i].result.median_trajectories_to_threshold);
  for (std::size_t i : {0u, 2u}) {
    if (medians[i] < medians[1]) {
      const double p = mann_whitney_p(hits[1], hits[i]);
      detail += "; B=" + std::to_string(Bs[i]) + " lower, Mann-Whitney p=" + fmt(p);
      if (p < 0.05) ok = false;
    }
  }
  return {ok, detail + " (strict loss = lower median with p < 0.05)"};
}

// 10. Norm and Lipschitz bounds on sampled cart-pole trajectories.
Outcome proposition_bounds() {
  const CartPole env;
  RngStream rng(StreamDomain::Diagnostics, 110, 0, 0, 0);
  const GaussianLinearPolicy policy(4, 1, 1.0, 10.0, random_parameters(5, 0.5, rng));
  std::string detail;
  bool ok = true;
  for (EstimatorKind kind : {EstimatorKind::Reinforce, EstimatorKind::Gpomdp}) {
    const PropositionCheck p = proposition_bound_check(env, policy, 200, {kind, 0.99, 0.0, false}, 10000, 100, 110);
    ok = ok && p.norm_violations == 0 && p.lipschitz_violations == 0;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(kind)) + ": G=" + fmt(p.bounds.G) +
              " M=" + fmt(p.bounds.M) + " norm violations " + std::to_string(p.norm_violations) + "/" +
              std::to_string(p.trajectories) + " (max ratio " + fmt(p.max_norm_ratio) + "), Lipschitz violations " +
              std::to_string(p.lipschitz_violations) + "/" + std::to_string(p.pairs) + " (max ratio " +
              fmt(p.max_lipschitz_ratio) + ")";
  }
  return {ok, detail};
}

// 11. Repeating a run reproduces the metrics bytes.
Outcome determinism() {
  bool ok = true;
  std::size_t files = 0;
  for (const char* name : {"cartpole_svrpg.json", "cartpole_gpomdp.json"}) {
    std::array<fs::path, 2> dirs;
    for (int k = 0; k < 2; ++k) {
      RunConfig c = preset(name, "determinism_" + std::to_string(k));
      c.seeds = {0, 1};
      c.budget = 400;
      dirs[k] = run_experiment(c).output_dir;
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const std::string a = read_file(entry.path());
      ok = ok && !a.empty() && a == read_file(dirs[1] / entry.path().filename());
    }
  }
  return {ok && files > 0, std::to_string(files) + " CSV files compared byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"estimator unbiasedness", estimator_unbiasedness},
      {"importance-weight identities", weight_identities},
      {"quadratic weight-variance growth", quadratic_variance},
      {"semi-stochastic gradient unbiasedness", semi_stochastic_unbiasedness},
      {"gradient correctness", gradient_correctness},
      {"theorem bound on the bandit", theorem_bound_holds},
      {"sample-complexity slope", sample_complexity_slope},
      {"cart-pole: svrpg vs gpomdp", cartpole_comparison},
      {"cart-pole minibatch sweep", cartpole_sweep},
      {"proposition bound checks", proposition_bounds},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " -- "
              << o.detail << " [" << fmt(secs) << " s]" << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
