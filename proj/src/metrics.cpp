#include "svrpg/metrics.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace svrpg {

RunSummary summarize(const RunMetrics& metrics, double threshold) {
  RunSummary summary;
  for (const auto& row : metrics.rows) {
    if (row.avg_return >= threshold) {
      summary.trajectories_to_threshold = row.trajectories_consumed;
      break;
    }
  }
  if (!metrics.rows.empty()) summary.final_return = metrics.rows.back().avg_return;
  return summary;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_metrics_csv(const RunMetrics& metrics, std::ostream& out) {
  out << kMetricsCsvHeader << '\n';
  for (const auto& r : metrics.rows) {
    out << r.epoch << ',' << r.iteration << ',' << r.trajectories_consumed << ','
        << format_double(r.avg_return) << ',' << format_double(r.grad_norm_proxy) << ','
        << r.weight_clip_count << ',' << format_double(r.step_size) << '\n';
  }
}

namespace {

template <typename T>
T parse_field(const std::string& text, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    throw std::runtime_error("metrics CSV line " + std::to_string(line) + ": cannot parse '" +
                             text + "'");
  return value;
}

}  // namespace

RunMetrics read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader)
    throw std::runtime_error("metrics CSV has an unexpected header");
  RunMetrics metrics;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw std::runtime_error("metrics CSV line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields");
    IterationRecord r;
    r.epoch = parse_field<int>(fields[0], line_no);
    r.iteration = parse_field<int>(fields[1], line_no);
    r.trajectories_consumed = parse_field<std::size_t>(fields[2], line_no);
    r.avg_return = parse_field<double>(fields[3], line_no);
    r.grad_norm_proxy = parse_field<double>(fields[4], line_no);
    r.weight_clip_count = parse_field<std::size_t>(fields[5], line_no);
    r.step_size = parse_field<double>(fields[6], line_no);
    metrics.rows.push_back(r);
  }
  return metrics;
}

}  // namespace svrpg
