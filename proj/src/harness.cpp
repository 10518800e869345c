#include "svrpg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "svrpg/rollout.hpp"

namespace svrpg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Reinforce: return "reinforce";
    case Algorithm::Gpomdp: return "gpomdp";
    case Algorithm::Svrpg: return "svrpg";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "reinforce") return Algorithm::Reinforce;
  if (name == "gpomdp") return Algorithm::Gpomdp;
  if (name == "svrpg") return Algorithm::Svrpg;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// RunConfig

std::string RunConfig::file_label() const {
  return label.empty() ? std::string(to_string(algorithm)) : label;
}

void RunConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("config: seeds must not be empty");
  if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("config: gamma must lie in (0, 1)");
  if (!(policy.sigma > 0.0)) throw std::invalid_argument("config: policy sigma must be positive");
  if (policy.hidden < 1) throw std::invalid_argument("config: hidden width must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("config: N must be >= 1");
  if (!(step_size >= 0.0)) throw std::invalid_argument("config: eta must be non-negative");
  if (evaluation.episodes < 1) throw std::invalid_argument("config: evaluation episodes must be >= 1");
  if (aggregate_step < 1) throw std::invalid_argument("config: aggregate_step must be >= 1");
  if (algorithm == Algorithm::Svrpg) {
    if (minibatch_size < 1) throw std::invalid_argument("config: B must be >= 1");
    if (epoch_length < 1) throw std::invalid_argument("config: m must be >= 1");
    if (budget != 0 && budget < static_cast<std::size_t>(batch_size + minibatch_size))
      throw std::invalid_argument("config: svrpg budget must be at least N + B");
  } else if (budget != 0 && budget < static_cast<std::size_t>(batch_size)) {
    throw std::invalid_argument("config: budget must be at least N");
  }
  if (environment != "cartpole" && environment != "mountaincar" &&
      !std::string_view(environment).starts_with("tabular:"))
    throw std::invalid_argument("config: unknown environment '" + environment + "'");
  if (std::string_view(environment).starts_with("tabular:")) {
    if (policy.family != PolicyFamily::SoftmaxTabular)
      throw std::invalid_argument("config: tabular environments need the softmax-tabular policy");
  } else if (policy.family == PolicyFamily::SoftmaxTabular) {
    throw std::invalid_argument("config: softmax-tabular policy needs a tabular environment");
  }
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig c;
  c.label = doc.value("label", c.label);
  c.environment = doc.value("environment", c.environment);
  c.horizon = doc.value("horizon", c.horizon);
  c.gamma = doc.value("gamma", c.gamma);
  if (doc.contains("policy")) {
    const json& p = doc.at("policy");
    c.policy.family = parse_policy_family(p.value("family", std::string(to_string(c.policy.family))));
    c.policy.sigma = p.value("sigma", c.policy.sigma);
    c.policy.hidden = p.value("hidden", c.policy.hidden);
    c.policy.feature_bound = p.value("feature_bound", c.policy.feature_bound);
  }
  c.algorithm = parse_algorithm(doc.value("algorithm", std::string(to_string(c.algorithm))));
  c.estimator = parse_estimator(doc.value("estimator", std::string(to_string(c.estimator))));
  c.baseline = doc.value("baseline", c.baseline);
  c.batch_size = doc.value("N", c.batch_size);
  c.minibatch_size = doc.value("B", c.minibatch_size);
  c.epoch_length = doc.value("m", c.epoch_length);
  c.step_size = doc.value("eta", c.step_size);
  if (doc.contains("inner_eta") && !doc.at("inner_eta").is_null())
    c.inner_step_size = doc.at("inner_eta").get<double>();
  if (doc.contains("practical")) {
    const json& p = doc.at("practical");
    c.initial_update = p.value("initial_update", c.initial_update);
    c.adaptive_step = p.value("adaptive_step", c.adaptive_step);
    c.adaptive_epoch = p.value("adaptive_epoch", c.adaptive_epoch);
  }
  c.log_weight_cap = doc.value("log_weight_cap", c.log_weight_cap);
  c.budget = doc.value("budget", c.budget);
  if (doc.contains("seeds")) c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  if (doc.contains("evaluation")) {
    const json& e = doc.at("evaluation");
    c.evaluation.episodes = e.value("episodes", c.evaluation.episodes);
    c.evaluation.seed = e.value("seed", c.evaluation.seed);
  }
  c.threshold = doc.value("threshold", c.threshold);
  c.output_dir = doc.value("output_dir", c.output_dir.string());
  c.aggregate_step = doc.value("aggregate_step", c.aggregate_step);
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return from_json(json::parse(in));
}

json RunConfig::to_json() const {
  json doc = {
      {"label", file_label()},
      {"environment", environment},
      {"horizon", horizon},
      {"gamma", gamma},
      {"policy",
       {{"family", to_string(policy.family)},
        {"sigma", policy.sigma},
        {"hidden", policy.hidden},
        {"feature_bound", policy.feature_bound}}},
      {"algorithm", to_string(algorithm)},
      {"estimator", to_string(estimator)},
      {"baseline", baseline},
      {"N", batch_size},
      {"B", minibatch_size},
      {"m", epoch_length},
      {"eta", step_size},
      {"inner_eta", inner_step_size ? json(*inner_step_size) : json(nullptr)},
      {"practical",
       {{"initial_update", initial_update},
        {"adaptive_step", adaptive_step},
        {"adaptive_epoch", adaptive_epoch}}},
      {"log_weight_cap", log_weight_cap},
      {"budget", budget},
      {"seeds", seeds},
      {"evaluation", {{"episodes", evaluation.episodes}, {"seed", evaluation.seed}}},
      {"threshold", threshold},
      {"output_dir", output_dir.string()},
      {"aggregate_step", aggregate_step},
  };
  return doc;
}

fs::path resolve_output_dir(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("SVRPG_OUTPUT_ROOT"); root != nullptr && *root != '\0')
    return fs::path(root) / dir;
  return dir;
}

// ---------------------------------------------------------------------------
// Runs

std::unique_ptr<Policy> make_initial_policy(const PolicySpec& spec, const Environment& env,
                                            std::uint64_t seed) {
  switch (spec.family) {
    case PolicyFamily::GaussianLinear:
      return std::make_unique<GaussianLinearPolicy>(env.state_dim(), env.action_dim(), spec.sigma,
                                                    spec.feature_bound);
    case PolicyFamily::GaussianMlp:
      return std::make_unique<GaussianMlpPolicy>(GaussianMlpPolicy::initialized(
          env.state_dim(), env.action_dim(), spec.hidden, spec.sigma, seed));
    case PolicyFamily::SoftmaxTabular: {
      const auto* tabular = dynamic_cast<const TabularEnvironment*>(&env);
      if (tabular == nullptr)
        throw std::invalid_argument("softmax-tabular policy needs a tabular environment");
      return std::make_unique<SoftmaxTabularPolicy>(tabular->mdp().num_states,
                                                    tabular->mdp().num_actions);
    }
  }
  throw std::invalid_argument("unknown policy family");
}

double evaluate_policy(const Environment& env, const Policy& policy, int horizon,
                       const EvaluationSpec& spec) {
  double total = 0.0;
  for (int i = 0; i < spec.episodes; ++i) {
    RngStream rng(StreamDomain::Evaluation, spec.seed, 0, 0, static_cast<std::uint64_t>(i));
    total += undiscounted_return(sample_trajectory(env, policy, horizon, rng));
  }
  return total / spec.episodes;
}

SeedRun run_seed(const RunConfig& config, std::uint64_t seed) {
  const auto env = make_environment(config.environment);
  const auto initial = make_initial_policy(config.policy, *env, seed);
  RunCallbacks callbacks;
  callbacks.evaluate = [&](const Policy& p) {
    return evaluate_policy(*env, p, config.horizon, config.evaluation);
  };
  EstimatorParams estimator{config.estimator, config.gamma, config.baseline, false};
  if (config.algorithm == Algorithm::Reinforce) estimator.kind = EstimatorKind::Reinforce;
  if (config.algorithm == Algorithm::Gpomdp) estimator.kind = EstimatorKind::Gpomdp;

  SeedRun run;
  run.seed = seed;
  if (config.algorithm == Algorithm::Svrpg) {
    SvrpgConfig sc;
    sc.epochs = std::numeric_limits<int>::max();
    sc.epoch_length = config.epoch_length;
    sc.step_size = config.step_size;
    sc.inner_step_size = config.inner_step_size;
    sc.batch_size = config.batch_size;
    sc.minibatch_size = config.minibatch_size;
    sc.estimator = estimator;
    sc.horizon = config.horizon;
    sc.initial_update = config.initial_update;
    sc.adaptive_step = config.adaptive_step;
    sc.adaptive_epoch = config.adaptive_epoch;
    sc.log_weight_cap = config.log_weight_cap;
    sc.seed = seed;
    sc.trajectory_budget = config.budget;
    run.result = svrpg_run(sc, *env, *initial, callbacks);
  } else {
    GradientAscentConfig gc;
    gc.iterations = std::numeric_limits<int>::max();
    gc.step_size = config.step_size;
    gc.batch_size = config.batch_size;
    gc.estimator = estimator;
    gc.horizon = config.horizon;
    gc.adaptive_step = config.adaptive_step;
    gc.seed = seed;
    gc.trajectory_budget = config.budget;
    run.result = gradient_ascent_run(gc, *env, *initial, callbacks);
  }
  run.summary = summarize(run.result.metrics, config.threshold);
  return run;
}

namespace {

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

// Latest avg_return at or before x; the first row when x precedes it.
double value_at(const RunMetrics& run, std::size_t x) {
  const auto& rows = run.rows;
  auto it = std::upper_bound(rows.begin(), rows.end(), x, [](std::size_t v, const IterationRecord& r) {
    return v < r.trajectories_consumed;
  });
  if (it == rows.begin()) return rows.front().avg_return;
  return std::prev(it)->avg_return;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  const auto n = static_cast<double>(values.size());
  out.mean = sorted_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (double v : values) sq.push_back((v - out.mean) * (v - out.mean));
    out.std = std::sqrt(sorted_sum(sq) / (n - 1.0));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

}  // namespace

std::vector<AggregateRow> aggregate_runs(std::span<const RunMetrics> runs, std::size_t step) {
  if (step == 0) throw std::invalid_argument("aggregate step must be positive");
  std::vector<const RunMetrics*> present;
  std::size_t last = 0;
  for (const auto& r : runs) {
    if (r.rows.empty()) continue;
    present.push_back(&r);
    last = std::max(last, r.rows.back().trajectories_consumed);
  }
  std::vector<AggregateRow> out;
  if (present.empty()) return out;
  for (std::size_t x = 0;; x += step) {
    std::vector<double> values;
    for (const RunMetrics* r : present) values.push_back(value_at(*r, x));
    const MeanStd ms = mean_std(values);
    out.push_back(AggregateRow{x, ms.mean, ms.std, values.size()});
    if (x >= last) break;
  }
  return out;
}

std::optional<double> median_with_failures(std::span<const std::optional<std::size_t>> values) {
  if (values.empty()) return std::nullopt;
  constexpr double kNever = std::numeric_limits<double>::infinity();
  std::vector<double> v;
  for (const auto& x : values) v.push_back(x ? static_cast<double>(*x) : kNever);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double med = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (std::isinf(med)) return std::nullopt;
  return med;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  ExperimentResult out;
  out.config = config;
  out.output_dir = resolve_output_dir(config.output_dir);
  fs::create_directories(out.output_dir);
  const std::string label = config.file_label();

  if (config.budget > 0) {
    // Seeds are independent; run them in parallel, one worker per core.
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    out.runs.resize(config.seeds.size());
    for (std::size_t start = 0; start < config.seeds.size(); start += workers) {
      std::vector<std::future<SeedRun>> jobs;
      const std::size_t end = std::min(config.seeds.size(), start + workers);
      for (std::size_t i = start; i < end; ++i)
        jobs.push_back(std::async(std::launch::async, run_seed, std::cref(config), config.seeds[i]));
      for (std::size_t i = start; i < end; ++i) out.runs[i] = jobs[i - start].get();
    }
  } else {
    for (std::uint64_t seed : config.seeds) out.runs.push_back(SeedRun{seed, {}, {}});
  }

  std::vector<RunMetrics> metrics;
  std::vector<std::optional<std::size_t>> hits;
  json per_seed = json::array();
  for (const SeedRun& run : out.runs) {
    std::ostringstream csv;
    write_metrics_csv(run.result.metrics, csv);
    const std::string stem = label + "_seed" + std::to_string(run.seed);
    write_file(out.output_dir / (stem + ".csv"), csv.str());
    if (run.result.final_parameters.size() > 0)
      save_parameters(out.output_dir / (stem + "_theta.json"), run.result.final_parameters);
    metrics.push_back(run.result.metrics);
    hits.push_back(run.summary.trajectories_to_threshold);
    per_seed.push_back({{"seed", run.seed},
                        {"trajectories_to_threshold",
                         run.summary.trajectories_to_threshold
                             ? json(*run.summary.trajectories_to_threshold)
                             : json(nullptr)},
                        {"final_return", run.summary.final_return},
                        {"trajectories_consumed", run.result.trajectories_consumed},
                        {"weight_clip_count", run.result.weight_clip_count}});
  }
  out.aggregate = aggregate_runs(metrics, config.aggregate_step);
  out.median_trajectories_to_threshold = median_with_failures(hits);

  std::ostringstream agg;
  agg << "trajectories,mean_return,std_return,n_seeds\n";
  for (const auto& r : out.aggregate)
    agg << r.trajectories << ',' << format_double(r.mean_return) << ','
        << format_double(r.std_return) << ',' << r.n_seeds << '\n';
  write_file(out.output_dir / (label + "_aggregate.csv"), agg.str());

  const json summary = {
      {"label", label},
      {"threshold", config.threshold},
      {"median_trajectories_to_threshold",
       out.median_trajectories_to_threshold ? json(*out.median_trajectories_to_threshold)
                                            : json(nullptr)},
      {"seeds", per_seed}};
  write_file(out.output_dir / (label + "_summary.json"), summary.dump(2) + "\n");
  write_file(out.output_dir / "config.json", config.to_json().dump(2) + "\n");
  return out;
}

SweepResult sweep_minibatch(const RunConfig& base, std::span<const int> minibatch_sizes,
                            std::span<const double> step_sizes) {
  if (minibatch_sizes.size() != step_sizes.size())
    throw std::invalid_argument("sweep: B and eta lists differ in length");
  if (minibatch_sizes.empty()) throw std::invalid_argument("sweep: empty B list");
  // Validate every point before running any of them.
  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < minibatch_sizes.size(); ++i) {
    RunConfig c = base;
    c.algorithm = Algorithm::Svrpg;
    c.minibatch_size = minibatch_sizes[i];
    c.step_size = step_sizes[i];
    std::ostringstream tag;
    tag << "B" << minibatch_sizes[i] << "_eta" << format_double(step_sizes[i]);
    c.label = "svrpg_B" + std::to_string(minibatch_sizes[i]);
    c.output_dir = base.output_dir / tag.str();
    c.validate();
    configs.push_back(std::move(c));
  }

  SweepResult out;
  for (std::size_t i = 0; i < configs.size(); ++i)
    out.entries.push_back(SweepEntry{minibatch_sizes[i], step_sizes[i], run_experiment(configs[i])});

  out.ranking.resize(out.entries.size());
  for (std::size_t i = 0; i < out.ranking.size(); ++i) out.ranking[i] = i;
  auto key = [&](std::size_t i) {
    const auto& m = out.entries[i].result.median_trajectories_to_threshold;
    return m ? *m : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  json ranked = json::array();
  for (std::size_t idx : out.ranking) {
    const SweepEntry& e = out.entries[idx];
    const auto& med = e.result.median_trajectories_to_threshold;
    ranked.push_back({{"B", e.minibatch_size},
                      {"eta", e.step_size},
                      {"median_trajectories_to_threshold", med ? json(*med) : json(nullptr)},
                      {"output_dir", e.result.output_dir.string()}});
  }
  const fs::path dir = resolve_output_dir(base.output_dir);
  fs::create_directories(dir);
  write_file(dir / "sweep_summary.json", json{{"ranking", ranked}}.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// Plot data

void emit_plot_data(const fs::path& in_dir, const fs::path& out_file, int window) {
  if (window < 1) throw std::invalid_argument("plot-data: window must be >= 1");
  if (!fs::is_directory(in_dir))
    throw std::runtime_error("plot-data: missing input directory " + in_dir.string());

  const std::regex pattern(R"((.+)_seed(\d+)\.csv)");
  std::map<std::string, std::map<std::uint64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern))
      files[m[1].str()][std::stoull(m[2].str())] = entry.path();
  }

  // When the directory carries its config, every listed seed must be present.
  std::vector<std::string> missing;
  if (const fs::path cfg = in_dir / "config.json"; fs::exists(cfg)) {
    const RunConfig config = RunConfig::load(cfg);
    for (std::uint64_t seed : config.seeds) {
      const auto& by_seed = files[config.file_label()];
      if (!by_seed.contains(seed))
        missing.push_back((in_dir / (config.file_label() + "_seed" + std::to_string(seed) + ".csv")).string());
    }
  }
  if (files.empty() && missing.empty())
    missing.push_back((in_dir / "<label>_seed<k>.csv").string());
  if (!missing.empty()) {
    std::string msg = "plot-data: missing metrics files:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw std::runtime_error(msg);
  }

  std::ostringstream out;
  out << "algorithm,seed,x,y,y_mean,y_std\n";
  for (const auto& [label, by_seed] : files) {
    if (by_seed.empty()) continue;
    // Smoothed curve per seed, stored as metrics so value_at() can look it up.
    std::map<std::uint64_t, RunMetrics> smoothed;
    for (const auto& [seed, path] : by_seed) {
      std::ifstream in(path);
      const RunMetrics raw = read_metrics_csv(in);
      RunMetrics s = raw;
      for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        const std::size_t first = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
        std::vector<double> vals;
        for (std::size_t j = first; j <= i; ++j) vals.push_back(raw.rows[j].avg_return);
        s.rows[i].avg_return = window == 1 ? raw.rows[i].avg_return
                                           : sorted_sum(vals) / static_cast<double>(vals.size());
      }
      smoothed.emplace(seed, std::move(s));
    }
    for (const auto& [seed, run] : smoothed) {
      for (const auto& row : run.rows) {
        std::vector<double> across;
        for (const auto& [other_seed, other] : smoothed)
          if (!other.rows.empty()) across.push_back(value_at(other, row.trajectories_consumed));
        const MeanStd ms = mean_std(across);
        out << label << ',' << seed << ',' << row.trajectories_consumed << ','
            << format_double(row.avg_return) << ',' << format_double(ms.mean) << ','
            << format_double(ms.std) << '\n';
      }
    }
  }
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  write_file(out_file, out.str());
}

void save_parameters(const fs::path& path, const Eigen::VectorXd& theta) {
  json doc = json::array();
  for (Eigen::Index i = 0; i < theta.size(); ++i) doc.push_back(theta(i));
  write_file(path, doc.dump() + "\n");
}

Eigen::VectorXd load_parameters(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file " + path.string());
  const auto values = json::parse(in).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace svrpg
