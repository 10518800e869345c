#ifndef SVRPG_HARNESS_HPP
#define SVRPG_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svrpg/environment.hpp"
#include "svrpg/estimators.hpp"
#include "svrpg/metrics.hpp"
#include "svrpg/policy.hpp"
#include "svrpg/svrpg.hpp"

namespace svrpg {

enum class Algorithm { Reinforce, Gpomdp, Svrpg };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct PolicySpec {
  PolicyFamily family = PolicyFamily::GaussianMlp;
  double sigma = 1.0;
  int hidden = 8;
  double feature_bound = 10.0;
};

struct EvaluationSpec {
  int episodes = 20;
  std::uint64_t seed = 1000003;
};

/// Everything needed to reproduce one experiment directory.
///
/// REINFORCE/GPOMDP runs use batch_size and step_size; SVRPG additionally
/// uses minibatch_size, epoch_length and the practical-variant flags.
/// Evaluation rollouts are not counted in trajectories_consumed.
struct RunConfig {
  std::string label;  // file prefix; defaults to the algorithm name
  std::string environment = "cartpole";
  int horizon = 200;
  double gamma = 0.99;
  PolicySpec policy;
  Algorithm algorithm = Algorithm::Svrpg;
  EstimatorKind estimator = EstimatorKind::Gpomdp;
  double baseline = 0.0;
  int batch_size = 25;       // N
  int minibatch_size = 10;   // B
  int epoch_length = 10;     // m
  double step_size = 0.01;   // eta
  std::optional<double> inner_step_size;
  bool initial_update = true;
  bool adaptive_step = true;
  bool adaptive_epoch = true;
  double log_weight_cap = kDefaultLogWeightCap;
  std::size_t budget = 5000;  // trajectories; 0 produces empty metrics
  std::vector<std::uint64_t> seeds{0};
  EvaluationSpec evaluation;
  double threshold = 180.0;
  std::filesystem::path output_dir = "results";
  std::size_t aggregate_step = 50;  // x-grid spacing of the aggregate CSV

  std::string file_label() const;
  /// Throws std::invalid_argument before any sampling happens.
  void validate() const;

  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Resolves a relative output directory against $SVRPG_OUTPUT_ROOT when set.
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

std::unique_ptr<Policy> make_initial_policy(const PolicySpec& spec, const Environment& env,
                                            std::uint64_t seed);

/// Mean undiscounted return over the fixed evaluation batch.
double evaluate_policy(const Environment& env, const Policy& policy, int horizon,
                       const EvaluationSpec& spec);

struct SeedRun {
  std::uint64_t seed = 0;
  OptimizationResult result;
  RunSummary summary;
};

/// Trains one seed in memory; nothing is written.
SeedRun run_seed(const RunConfig& config, std::uint64_t seed);

struct AggregateRow {
  std::size_t trajectories = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  std::size_t n_seeds = 0;
};

/// Mean and sample standard deviation across runs on a regular grid of
/// trajectories_consumed. Each run contributes its latest row at or before
/// the grid point (its last row once it has finished). Invariant to the
/// order of `runs`.
std::vector<AggregateRow> aggregate_runs(std::span<const RunMetrics> runs, std::size_t step);

struct ExperimentResult {
  RunConfig config;
  std::vector<SeedRun> runs;
  std::vector<AggregateRow> aggregate;
  /// Median trajectories-to-threshold; nullopt when most seeds never reach it.
  std::optional<double> median_trajectories_to_threshold;
  std::filesystem::path output_dir;
};

/// Median with unreached runs ranked last.
std::optional<double> median_with_failures(std::span<const std::optional<std::size_t>> values);

/// Runs every seed (concurrently), then writes <label>_seed<k>.csv,
/// <label>_seed<k>_theta.json, <label>_aggregate.csv, <label>_summary.json
/// and the resolved config.json into the output directory.
ExperimentResult run_experiment(const RunConfig& config);

struct SweepEntry {
  int minibatch_size = 0;
  double step_size = 0.0;
  ExperimentResult result;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  /// Indices into entries ordered by median trajectories-to-threshold.
  std::vector<std::size_t> ranking;
};

/// One SVRPG experiment per (B, eta) pair, each under
/// <output_dir>/B<B>_eta<eta>, plus sweep_summary.json. Throws
/// std::invalid_argument when the lists differ in length or are empty.
SweepResult sweep_minibatch(const RunConfig& base, std::span<const int> minibatch_sizes,
                            std::span<const double> step_sizes);

/// Writes the tidy CSV (algorithm, seed, x, y, y_mean, y_std) from every
/// <label>_seed<k>.csv under in_dir. y is the trailing moving average over
/// `window` rows; y_mean/y_std are taken across seeds of the same label at
/// the same x. Throws std::runtime_error listing missing files.
void emit_plot_data(const std::filesystem::path& in_dir, const std::filesystem::path& out_file,
                    int window);

void save_parameters(const std::filesystem::path& path, const Eigen::VectorXd& theta);
Eigen::VectorXd load_parameters(const std::filesystem::path& path);

}  // namespace svrpg

#endif  // SVRPG_HARNESS_HPP
