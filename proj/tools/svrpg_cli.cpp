// Command-line front end: run, sweep, check, plot-data.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svrpg/check_suite.hpp"
#include "svrpg/harness.hpp"

namespace {

void apply_overrides(svrpg::RunConfig& config, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::string>& output,
                     const std::optional<std::size_t>& budget) {
  if (seed) config.seeds = {*seed};
  if (output) config.output_dir = *output;
  if (budget) config.budget = *budget;
}

void print_summary(const svrpg::ExperimentResult& result) {
  std::cout << result.config.file_label() << ": " << result.runs.size() << " seed(s) -> "
            << result.output_dir.string() << "\n";
  for (const auto& run : result.runs) {
    std::cout << "  seed " << run.seed << ": consumed " << run.result.trajectories_consumed
              << ", final return " << run.summary.final_return << ", to threshold ";
    if (run.summary.trajectories_to_threshold)
      std::cout << *run.summary.trajectories_to_threshold;
    else
      std::cout << "never";
    std::cout << "\n";
  }
  std::cout << "  median trajectories to threshold: ";
  if (result.median_trajectories_to_threshold)
    std::cout << *result.median_trajectories_to_threshold << "\n";
  else
    std::cout << "not reached\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic variance-reduced policy gradient experiments and diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::size_t> budget;

  auto* run = app.add_subcommand("run", "Train every seed of a config and write metrics");
  run->add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Run only this seed");
  run->add_option("--output", output, "Override output_dir");
  run->add_option("--budget", budget, "Override the trajectory budget");

  std::vector<int> minibatch_sizes;
  std::vector<double> step_sizes;
  auto* sweep = app.add_subcommand("sweep", "SVRPG mini-batch sweep over paired (B, eta) values");
  sweep->add_option("--config", config_path, "JSON base config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--B", minibatch_sizes, "Mini-batch sizes, comma separated")
      ->required()
      ->delimiter(',');
  sweep->add_option("--eta", step_sizes, "Step sizes paired with --B, comma separated")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seed", seed, "Run only this seed");
  sweep->add_option("--output", output, "Override output_dir");
  sweep->add_option("--budget", budget, "Override the trajectory budget");

  std::optional<std::string> report_path;
  auto* check = app.add_subcommand("check", "Run the identity/bound diagnostics and print a JSON report");
  check->add_option("--report", report_path, "Also write the report to this file");

  std::string in_dir;
  std::string out_file;
  int window = 1;
  auto* plot = app.add_subcommand("plot-data", "Emit tidy plotting CSV from a run directory");
  plot->add_option("--in", in_dir, "Directory holding <label>_seed<k>.csv files")->required();
  plot->add_option("--out", out_file, "Output CSV")->required();
  plot->add_option("--window", window, "Trailing moving-average window (rows)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      svrpg::RunConfig config = svrpg::RunConfig::load(config_path);
      apply_overrides(config, seed, output, budget);
      print_summary(svrpg::run_experiment(config));
    } else if (*sweep) {
      svrpg::RunConfig config = svrpg::RunConfig::load(config_path);
      apply_overrides(config, seed, output, budget);
      const auto result = svrpg::sweep_minibatch(config, minibatch_sizes, step_sizes);
      for (const auto& entry : result.entries) print_summary(entry.result);
      std::cout << "ranking (by median trajectories to threshold):";
      for (std::size_t idx : result.ranking) std::cout << " B=" << result.entries[idx].minibatch_size;
      std::cout << "\n";
    } else if (*check) {
      const svrpg::CheckReport report = svrpg::check_suite();
      const std::string text = report.json.dump(2);
      std::cout << text << "\n";
      if (report_path) {
        std::ofstream(*report_path) << text << "\n";
      }
      return report.passed ? EXIT_SUCCESS : EXIT_FAILURE;
    } else if (*plot) {
      svrpg::emit_plot_data(in_dir, out_file, window);
      std::cout << "wrote " << out_file << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
