#ifndef SVRPG_METRICS_HPP
#define SVRPG_METRICS_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "svrpg/policy.hpp"

namespace svrpg {

/// One metrics row, written after every parameter update.
struct IterationRecord {
  int epoch = 0;
  int iteration = 0;
  std::size_t trajectories_consumed = 0;
  double avg_return = 0.0;
  double grad_norm_proxy = 0.0;
  std::size_t weight_clip_count = 0;  // cumulative
  double step_size = 0.0;
};

struct RunMetrics {
  std::vector<IterationRecord> rows;
};

struct RunSummary {
  /// First trajectories_consumed at which avg_return >= threshold.
  std::optional<std::size_t> trajectories_to_threshold;
  double final_return = 0.0;
};

RunSummary summarize(const RunMetrics& metrics, double threshold);

inline constexpr const char* kMetricsCsvHeader =
    "epoch,iter,trajectories_consumed,avg_return,grad_norm_proxy,weight_clip_count,step_size";

void write_metrics_csv(const RunMetrics& metrics, std::ostream& out);
/// Throws std::runtime_error on a malformed header or row.
RunMetrics read_metrics_csv(std::istream& in);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

struct RunCallbacks {
  /// Average return reported in each row. When unset, rows report the mean
  /// undiscounted return of the trajectories sampled for that update.
  std::function<double(const Policy&)> evaluate;
  std::function<void(const IterationRecord&, const Policy&)> on_iteration;
};

struct OptimizationResult {
  RunMetrics metrics;
  Eigen::VectorXd final_parameters;
  /// Iterate drawn uniformly from every recorded iterate (reservoir sample).
  Eigen::VectorXd uniform_iterate;
  /// Every recorded iterate; filled only when requested in the config.
  std::vector<Eigen::VectorXd> iterates;
  std::size_t trajectories_consumed = 0;
  std::size_t weight_clip_count = 0;
  std::size_t inner_steps = 0;
  std::size_t epochs_run = 0;
};

}  // namespace svrpg

#endif  // SVRPG_METRICS_HPP
