// Copyright 2026 The parity-meter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// parity_meter command-line tool.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
// failure (degenerate density, zero ground truth, divergence), 4 a --check
// verdict failed, 1 anything else (I/O).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "parity_meter/core.hpp"
#include "parity_meter/csv.hpp"
#include "parity_meter/density.hpp"
#include "parity_meter/errors.hpp"
#include "parity_meter/metrics.hpp"
#include "parity_meter/optim.hpp"
#include "parity_meter/synth.hpp"
#include "parity_meter/transport.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace parity::cli {
namespace {

constexpr int kExitCheckFailed = 4;

// Where a command's files go. Directory mode writes every file under one
// directory with manifest.json beside them; single-file mode writes one file
// with <file>.manifest.json beside it, or stdout and no manifest.
class Sink {
 public:
  static Sink directory(fs::path dir) {
    Sink s;
    s.set_.emplace(dir);
    s.manifest_path_ = dir / "manifest.json";
    return s;
  }
  static Sink single_file(const std::optional<fs::path>& file) {
    Sink s;
    if (file) {
      s.set_.emplace(file->has_parent_path() ? file->parent_path() : fs::path("."));
      s.file_name_ = file->filename().string();
      s.manifest_path_ = fs::path(file->string() + ".manifest.json");
    }
    return s;
  }
  static Sink replay_file(const fs::path& dir, const std::string& name) {
    return single_file(dir / name);
  }

  // The one output of a single-file command.
  void emit_primary(const std::string& default_name, const std::string& content) {
    if (set_) {
      set_->write(file_name_.empty() ? default_name : file_name_, content);
    } else {
      std::cout << content;
    }
  }
  void emit(const std::string& name, const std::string& content) {
    set_->write(name, content);
  }
  // Summary lines: stdout unless stdout carries the primary output.
  std::ostream& info() { return set_ ? std::cout : std::cerr; }
  const fs::path& manifest_path() const { return manifest_path_; }

  void finish(RunManifest manifest) {
    if (!set_) return;
    manifest.outputs = set_->files();
    write_text_file(manifest_path_, manifest.to_json().dump(2) + "\n");
  }

 private:
  std::optional<OutputSet> set_;
  std::string file_name_;
  fs::path manifest_path_;
};

std::string to_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

ojson pair_json(const std::optional<GroupPair>& pair) {
  if (!pair) return nullptr;
  return ojson::array({pair->first, pair->second});
}

std::optional<GroupPair> pair_from_json(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  return GroupPair{v.at(0).get<GroupId>(), v.at(1).get<GroupId>()};
}

std::optional<GroupPair> pair_from_flag(const std::vector<GroupId>& values) {
  if (values.empty()) return std::nullopt;
  return GroupPair{values[0], values[1]};
}

GroupPair resolve_pair(const PredictionSet& ps, const std::optional<GroupPair>& pair) {
  if (pair) {
    for (GroupId g : {pair->first, pair->second}) {
      if (!ps.contains_group(g)) {
        throw GroupError("group " + std::to_string(g) + " is not in the input");
      }
    }
    if (pair->first == pair->second) throw GroupError("--pair needs two distinct groups");
    return *pair;
  }
  const auto ids = ps.group_ids();
  if (ids.size() != 2) {
    throw GroupError("input has " + std::to_string(ids.size()) +
                     " groups; choose one with --pair g0 g1");
  }
  return {ids[0], ids[1]};
}

std::vector<FileDigest> digest_inputs(const std::vector<std::string>& paths) {
  std::vector<FileDigest> out;
  for (const auto& p : paths) out.push_back({p, sha256_file(p)});
  return out;
}

template <typename T>
T config_value(const nlohmann::json& config, const char* key) {
  try {
    return config.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::string input;
  double threshold = 0.5;
  Eigen::Index pdf_grid = 5000;
  Eigen::Index cdf_grid = 10000;
  std::string bandwidth = "scott";
  std::optional<GroupPair> pair;
  std::string format = "json";

  MetricConfig metric_config() const {
    MetricConfig cfg;
    cfg.threshold = threshold;
    cfg.pdf_grid = pdf_grid;
    cfg.cdf_grid = cdf_grid;
    cfg.kde = KdeConfig::parse(bandwidth);
    cfg.validate();
    return cfg;
  }
  ojson to_json() const {
    return {{"input", input},         {"threshold", threshold},
            {"pdf_grid", pdf_grid},   {"cdf_grid", cdf_grid},
            {"bandwidth", bandwidth}, {"pair", pair_json(pair)},
            {"format", format}};
  }
  static ReportOptions from_json(const nlohmann::json& c) {
    ReportOptions o;
    o.input = config_value<std::string>(c, "input");
    o.threshold = config_value<double>(c, "threshold");
    o.pdf_grid = config_value<Eigen::Index>(c, "pdf_grid");
    o.cdf_grid = config_value<Eigen::Index>(c, "cdf_grid");
    o.bandwidth = config_value<std::string>(c, "bandwidth");
    o.pair = pair_from_json(c.at("pair"));
    o.format = config_value<std::string>(c, "format");
    return o;
  }
};

int run_report(const ReportOptions& o, Sink& sink) {
  const MetricConfig cfg = o.metric_config();
  const PredictionSet ps = read_predictions_csv_file(o.input);
  const MetricReport report = o.pair ? pair_report(ps, resolve_pair(ps, o.pair), cfg)
                                     : multi_group_report(ps, cfg);
  if (o.format == "table") {
    sink.emit_primary("report.txt", to_table(report));
  } else {
    sink.emit_primary("report.json", to_json(report));
  }
  sink.finish({"report", o.to_json(), std::nullopt, digest_inputs({o.input}), {}});
  return 0;
}

// ----------------------------------------------------------------- sweep

struct SweepOptions {
  std::string input;
  Eigen::Index steps = 10001;
  Eigen::Index cdf_grid = 10000;
  std::optional<GroupPair> pair;
  bool check = false;

  ojson to_json() const {
    return {{"input", input},       {"steps", steps}, {"cdf_grid", cdf_grid},
            {"pair", pair_json(pair)}, {"check", check}};
  }
  static SweepOptions from_json(const nlohmann::json& c) {
    SweepOptions o;
    o.input = config_value<std::string>(c, "input");
    o.steps = config_value<Eigen::Index>(c, "steps");
    o.cdf_grid = config_value<Eigen::Index>(c, "cdf_grid");
    o.pair = pair_from_json(c.at("pair"));
    o.check = config_value<bool>(c, "check");
    return o;
  }
};

int run_sweep(const SweepOptions& o, Sink& sink) {
  MetricConfig cfg;
  cfg.cdf_grid = o.cdf_grid;
  cfg.validate();
  const PredictionSet ps = read_predictions_csv_file(o.input);
  const GroupPair pair = resolve_pair(ps, o.pair);
  const ThresholdSweep sweep = threshold_sweep(ps, pair, o.steps);
  const double gap = delta_dp_c(ps, pair);
  const double area = abcc(ps, pair, cfg);
  // Each rule integrates a step function whose jumps sum to at most 2, so its
  // error is at most one grid spacing.
  const double tol = 1.0 / static_cast<double>(o.steps - 1) +
                     1.0 / static_cast<double>(o.cdf_grid - 1) + 1e-12;
  const bool bound_ok = sweep.integral >= gap - tol;
  const bool identity_ok = std::abs(sweep.integral - area) <= tol;
  const bool pass = bound_ok && identity_ok;

  sink.emit_primary("sweep.csv", to_text([&](std::ostream& out) { write_sweep_csv(out, sweep); }));
  auto& info = sink.info();
  info << "integral " << format_double(sweep.integral) << '\n'
       << "exact_integral " << format_double(sweep.exact_integral) << '\n'
       << "delta_dp_c " << format_double(gap) << '\n'
       << "abcc " << format_double(area) << '\n'
       << "tolerance " << format_double(tol) << '\n'
       << "integral >= delta_dp_c: " << (bound_ok ? "PASS" : "FAIL") << '\n'
       << "integral == abcc: " << (identity_ok ? "PASS" : "FAIL") << '\n'
       << "verdict " << (pass ? "PASS" : "FAIL") << '\n';
  sink.finish({"sweep", o.to_json(), std::nullopt, digest_inputs({o.input}), {}});
  return o.check && !pass ? kExitCheckFailed : 0;
}

// --------------------------------------------------------------- density

struct DensityOptions {
  std::string input;
  Eigen::Index grid = 1000;
  std::string bandwidth = "scott";

  ojson to_json() const {
    return {{"input", input}, {"grid", grid}, {"bandwidth", bandwidth}};
  }
  static DensityOptions from_json(const nlohmann::json& c) {
    DensityOptions o;
    o.input = config_value<std::string>(c, "input");
    o.grid = config_value<Eigen::Index>(c, "grid");
    o.bandwidth = config_value<std::string>(c, "bandwidth");
    return o;
  }
};

int run_density(const DensityOptions& o, Sink& sink) {
  const KdeConfig kde = KdeConfig::parse(o.bandwidth);
  if (o.grid < 2) throw ConfigError("--grid must be at least 2");
  const PredictionSet ps = read_predictions_csv_file(o.input);
  for (const GroupView& view : split_groups(ps)) {
    const std::string id = std::to_string(view.group_id);
    const Curve pdf = sample_curve(fit_kde(view, kde), o.grid);
    const Curve cdf = sample_curve(fit_ecdf(view), o.grid);
    sink.emit("pdf_g" + id + ".csv",
              to_text([&](std::ostream& out) { write_curve_csv(out, pdf); }));
    sink.emit("cdf_g" + id + ".csv",
              to_text([&](std::ostream& out) { write_curve_csv(out, cdf); }));
  }
  sink.finish({"density", o.to_json(), std::nullopt, digest_inputs({o.input}), {}});
  return 0;
}

// ---------------------------------------------------------- bias-density

struct BiasDensityOptions {
  std::string input;
  std::optional<GroupPair> pair;
  Eigen::Index resolution = 1000;
  Eigen::Index bins = 100;
  std::string construction = "quantile";
  bool svg = false;

  PlanConstruction plan_construction() const {
    if (construction == "quantile") return PlanConstruction::kQuantileGrid;
    if (construction == "sorted") return PlanConstruction::kSortedMatch;
    throw ConfigError("--construction must be quantile or sorted");
  }
  ojson to_json() const {
    return {{"input", input},           {"pair", pair_json(pair)},
            {"resolution", resolution}, {"bins", bins},
            {"construction", construction}, {"svg", svg}};
  }
  static BiasDensityOptions from_json(const nlohmann::json& c) {
    BiasDensityOptions o;
    o.input = config_value<std::string>(c, "input");
    o.pair = pair_from_json(c.at("pair"));
    o.resolution = config_value<Eigen::Index>(c, "resolution");
    o.bins = config_value<Eigen::Index>(c, "bins");
    o.construction = config_value<std::string>(c, "construction");
    o.svg = config_value<bool>(c, "svg");
    return o;
  }
};

int run_bias_density(const BiasDensityOptions& o, Sink& sink) {
  const PlanConstruction construction = o.plan_construction();
  const PredictionSet ps = read_predictions_csv_file(o.input);
  const GroupPair pair = resolve_pair(ps, o.pair);
  const GroupView v0 = group_view(ps, pair.first);
  const GroupView v1 = group_view(ps, pair.second);
  const TransportPlan plan = optimal_plan(v0, v1, construction, o.resolution);
  const BiasDensity density = bias_density(plan);
  const BiasHeatmap heatmap = bin_bias_density(plan, o.bins);
  const double w1 = wasserstein1(fit_ecdf(v0), fit_ecdf(v1));

  sink.emit("coupling.csv", to_text([&](std::ostream& out) { write_plan_csv(out, plan); }));
  sink.emit("heatmap.csv",
            to_text([&](std::ostream& out) { write_heatmap_csv(out, heatmap); }));
  if (o.svg) {
    sink.emit("bias_density.svg",
              to_text([&](std::ostream& out) { write_heatmap_svg(out, heatmap); }));
  }
  sink.info() << "total_rho " << format_double(density.total) << '\n'
              << "w1 " << format_double(w1) << '\n'
              << "couplings " << plan.couplings.size() << '\n';
  sink.finish({"bias-density", o.to_json(), std::nullopt, digest_inputs({o.input}), {}});
  return 0;
}

// ----------------------------------------------------------------- synth

struct SynthFlags {
  std::string config_path;
  double mu0 = 0.3, sd0 = 0.1, mu1 = 0.4, sd1 = 0.1;
  bool no_sigmoid = false;
  Eigen::Index n_per_group = 1000;
  std::uint64_t seed = 0;

  void add_to(CLI::App* app) {
    auto* config = app->add_option("--config", config_path,
                                   "JSON synth spec (replaces the flags below)");
    const std::vector<CLI::Option*> flags{
        app->add_option("--mu0", mu0, "group 0 mean")->capture_default_str(),
        app->add_option("--sd0", sd0, "group 0 sd")->capture_default_str(),
        app->add_option("--mu1", mu1, "group 1 mean")->capture_default_str(),
        app->add_option("--sd1", sd1, "group 1 sd")->capture_default_str(),
        app->add_flag("--no-sigmoid", no_sigmoid,
                      "rejection-sample into [0,1] instead of the logistic map"),
        app->add_option("--n-per-group", n_per_group)->capture_default_str(),
        app->add_option("--seed", seed)->capture_default_str()};
    for (auto* f : flags) config->excludes(f);
  }
  SynthSpec spec() const {
    if (!config_path.empty()) {
      try {
        return synth_spec_from_json(nlohmann::json::parse(read_text_file(config_path)));
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in '" + config_path + "': " + e.what());
      }
    }
    SynthSpec s;
    s.dist0 = Distribution::normal(mu0, sd0);
    s.dist1 = Distribution::normal(mu1, sd1);
    s.map_through_sigmoid = !no_sigmoid;
    s.n_per_group = n_per_group;
    s.seed = seed;
    s.validate();
    return s;
  }
  std::vector<std::string> inputs() const {
    return config_path.empty() ? std::vector<std::string>{}
                               : std::vector<std::string>{config_path};
  }
};

struct SynthOptions {
  SynthSpec spec;
  ojson to_json() const { return {{"spec", parity::to_json(spec)}}; }
  static SynthOptions from_json(const nlohmann::json& c) {
    return {synth_spec_from_json(c.at("spec"))};
  }
};

ojson truth_json(const GroundTruth& t) {
  auto num = [](double v) { return std::isfinite(v) ? ojson(v) : ojson(); };
  return {{"abpc", num(t.abpc)},
          {"abcc", num(t.abcc)},
          {"mi_nats", num(t.mi)},
          {"abpc_method", to_string(t.abpc_method)},
          {"abcc_method", to_string(t.abcc_method)},
          {"mi_method", to_string(t.mi_method)}};
}

int run_synth(const SynthOptions& o, const std::vector<std::string>& inputs, Sink& sink) {
  const PredictionSet ps = generate(o.spec);
  sink.emit("predictions.csv",
            to_text([&](std::ostream& out) { write_predictions_csv(out, ps); }));
  sink.emit("ground_truth.json", truth_json(ground_truth(o.spec)).dump(2) + "\n");
  sink.finish({"synth", o.to_json(), o.spec.seed, digest_inputs(inputs), {}});
  return 0;
}

// ----------------------------------------------------------- convergence

struct ConvergenceCliOptions {
  SynthSpec spec;
  ConvergenceOptions run;
  bool check = false;

  ojson to_json() const {
    ojson metrics = ojson::array();
    for (auto m : run.metrics) metrics.push_back(to_string(m));
    return {{"spec", parity::to_json(spec)},
            {"n_values", run.n_values},
            {"trials", run.trials},
            {"metrics", metrics},
            {"relative_error", run.relative_error},
            {"check", check}};
  }
  static ConvergenceCliOptions from_json(const nlohmann::json& c) {
    ConvergenceCliOptions o;
    o.spec = synth_spec_from_json(c.at("spec"));
    o.run.n_values = config_value<std::vector<Eigen::Index>>(c, "n_values");
    o.run.trials = config_value<int>(c, "trials");
    o.run.metrics.clear();
    for (const auto& m : config_value<std::vector<std::string>>(c, "metrics")) {
      o.run.metrics.push_back(parse_estimated_metric(m));
    }
    o.run.relative_error = config_value<bool>(c, "relative_error");
    o.check = config_value<bool>(c, "check");
    return o;
  }
};

bool has_metric(const ConvergenceOptions& o, EstimatedMetric m) {
  return std::find(o.metrics.begin(), o.metrics.end(), m) != o.metrics.end();
}

int run_convergence(const ConvergenceCliOptions& o, const std::vector<std::string>& inputs,
                    Sink& sink) {
  const ConvergenceReport report = convergence_experiment(o.spec, o.run);
  sink.emit("convergence.csv",
            to_text([&](std::ostream& out) { write_convergence_csv(out, report); }));
  sink.emit("convergence.json", convergence_summary(report).dump(2) + "\n");

  auto& info = sink.info();
  bool pass = true;
  auto verdict = [&](const std::string& what, bool ok) {
    info << what << ": " << (ok ? "PASS" : "FAIL") << '\n';
    pass = pass && ok;
  };
  const auto& ns = o.run.n_values;
  for (auto m : {EstimatedMetric::kAbpc, EstimatedMetric::kAbcc}) {
    if (!has_metric(o.run, m)) continue;
    bool decreasing = true;
    for (std::size_t i = 1; i < ns.size(); ++i) {
      decreasing = decreasing && report.median(ns[i], m) < report.median(ns[i - 1], m);
    }
    verdict(std::string(to_string(m)) + " median error strictly decreasing", decreasing);
  }
  if (has_metric(o.run, EstimatedMetric::kAbcc)) {
    const double s = report.slope(EstimatedMetric::kAbcc);
    info << "abcc slope " << format_double(s) << '\n';
    verdict("abcc slope in [-0.8, -0.25]", s >= -0.8 && s <= -0.25);
  }
  if (has_metric(o.run, EstimatedMetric::kAbcc) && has_metric(o.run, EstimatedMetric::kMi)) {
    bool above = true;
    for (auto n : ns) {
      above = above && report.median(n, EstimatedMetric::kMi) >
                           report.median(n, EstimatedMetric::kAbcc);
    }
    verdict("mi median error above abcc at every N", above);
  }
  sink.finish({"convergence", o.to_json(), o.spec.seed, digest_inputs(inputs), {}});
  return o.check && !pass ? kExitCheckFailed : 0;
}

// ------------------------------------------------------------- train-toy

struct TrainOptions {
  std::string input;
  std::string penalty = "none";
  double lambda = 1.0;
  double bandwidth = 0.05;
  Eigen::Index grid = 200;
  double learning_rate = 0.5;
  int epochs = 300;
  std::uint64_t seed = 0;
  int report_every = 1;
  bool halving = true;

  TrainConfig config() const {
    TrainConfig cfg;
    if (penalty == "none") {
      cfg.penalty = Penalty::none();
    } else if (penalty == "dpc") {
      cfg.penalty = Penalty::delta_dp_c(lambda);
    } else if (penalty == "abpc") {
      cfg.penalty = Penalty::abpc_kde(lambda, bandwidth, grid);
    } else {
      throw ConfigError("--penalty must be none, dpc or abpc");
    }
    cfg.learning_rate = learning_rate;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.report_every = report_every;
    cfg.halve_on_increase = halving;
    return cfg;
  }
  ojson to_json() const {
    return {{"input", input},         {"penalty", penalty},
            {"lambda", lambda},       {"bandwidth", bandwidth},
            {"grid", grid},           {"learning_rate", learning_rate},
            {"epochs", epochs},       {"seed", seed},
            {"report_every", report_every}, {"halving", halving}};
  }
  static TrainOptions from_json(const nlohmann::json& c) {
    TrainOptions o;
    o.input = config_value<std::string>(c, "input");
    o.penalty = config_value<std::string>(c, "penalty");
    o.lambda = config_value<double>(c, "lambda");
    o.bandwidth = config_value<double>(c, "bandwidth");
    o.grid = config_value<Eigen::Index>(c, "grid");
    o.learning_rate = config_value<double>(c, "learning_rate");
    o.epochs = config_value<int>(c, "epochs");
    o.seed = config_value<std::uint64_t>(c, "seed");
    o.report_every = config_value<int>(c, "report_every");
    o.halving = config_value<bool>(c, "halving");
    return o;
  }
};

int run_train(const TrainOptions& o, Sink& sink) {
  const TrainConfig cfg = o.config();
  const Batch batch = [&] {
    std::istringstream in(read_text_file(o.input));
    return read_training_csv(in);
  }();
  const TrainResult result = train(batch, cfg);
  sink.emit("trajectory.csv", to_text([&](std::ostream& out) {
              write_trajectory_csv(out, result.trajectory);
            }));
  ojson model;
  model["weights"] = std::vector<double>(result.model.weights.data(),
                                         result.model.weights.data() +
                                             result.model.weights.size());
  model["bias"] = result.model.bias;
  model["final"] = ojson::parse(to_json(result.trajectory.back().report));
  sink.emit("model.json", model.dump(2) + "\n");

  const MetricReport& last = result.trajectory.back().report;
  sink.info() << "epochs " << result.trajectory.back().epoch << '\n'
              << "loss " << format_double(result.trajectory.back().loss) << '\n'
              << "acc " << (last.acc ? format_double(*last.acc) : "n/a") << '\n'
              << "delta_dp_c " << format_double(last.delta_dp_c) << '\n'
              << "abpc " << format_double(last.abpc) << '\n'
              << "abcc " << format_double(last.abcc) << '\n';
  sink.finish({"train-toy", o.to_json(), o.seed, digest_inputs({o.input}), {}});
  return 0;
}

// ----------------------------------------------------------- synth-train

struct SynthTrainOptions {
  Eigen::Index n_per_group = 1000;
  std::uint64_t seed = 7;

  ojson to_json() const { return {{"n_per_group", n_per_group}, {"seed", seed}}; }
  static SynthTrainOptions from_json(const nlohmann::json& c) {
    return {config_value<Eigen::Index>(c, "n_per_group"),
            config_value<std::uint64_t>(c, "seed")};
  }
};

int run_synth_train(const SynthTrainOptions& o, Sink& sink) {
  const Batch batch = make_biased_fixture(o.n_per_group, o.seed);
  sink.emit("train.csv", to_text([&](std::ostream& out) { write_training_csv(out, batch); }));
  sink.finish({"synth-train", o.to_json(), o.seed, {}, {}});
  return 0;
}

// ---------------------------------------------------------------- replay

int run_replay(const std::string& manifest_path, const fs::path& out_dir, bool check) {
  const RunManifest m = RunManifest::from_json(
      nlohmann::json::parse(read_text_file(manifest_path), nullptr, false));
  for (const auto& input : m.inputs) {
    if (sha256_file(input.name) != input.sha256) {
      throw InputError("input '" + input.name + "' does not match the manifest digest");
    }
  }
  std::vector<std::string> inputs;
  for (const auto& input : m.inputs) inputs.push_back(input.name);
  const std::string primary = m.outputs.empty() ? std::string() : m.outputs.front().name;

  int code = 0;
  Sink sink = Sink::directory(out_dir);
  if (m.command == "report") {
    sink = Sink::replay_file(out_dir, primary);
    code = run_report(ReportOptions::from_json(m.config), sink);
  } else if (m.command == "sweep") {
    sink = Sink::replay_file(out_dir, primary);
    code = run_sweep(SweepOptions::from_json(m.config), sink);
  } else if (m.command == "density") {
    code = run_density(DensityOptions::from_json(m.config), sink);
  } else if (m.command == "bias-density") {
    code = run_bias_density(BiasDensityOptions::from_json(m.config), sink);
  } else if (m.command == "synth") {
    code = run_synth(SynthOptions::from_json(m.config), inputs, sink);
  } else if (m.command == "convergence") {
    code = run_convergence(ConvergenceCliOptions::from_json(m.config), inputs, sink);
  } else if (m.command == "train-toy") {
    code = run_train(TrainOptions::from_json(m.config), sink);
  } else if (m.command == "synth-train") {
    code = run_synth_train(SynthTrainOptions::from_json(m.config), sink);
  } else {
    throw SchemaError("manifest has unknown command '" + m.command + "'");
  }
  if (check) {
    const RunManifest again = RunManifest::from_json(
        nlohmann::json::parse(read_text_file(sink.manifest_path())));
    bool same = again.outputs.size() == m.outputs.size();
    for (std::size_t i = 0; same && i < m.outputs.size(); ++i) {
      same = again.outputs[i].name == m.outputs[i].name &&
             again.outputs[i].sha256 == m.outputs[i].sha256;
    }
    std::cout << "outputs match manifest: " << (same ? "PASS" : "FAIL") << '\n';
    if (!same) return kExitCheckFailed;
  }
  return code;
}

}  // namespace
}  // namespace parity::cli

int main(int argc, char** argv) {
  using namespace parity;
  using namespace parity::cli;

  CLI::App app{"Demographic-parity metrics for binary classifiers: threshold, "
               "mean, ABPC and ABCC gaps, transport bias density, synthetic "
               "convergence studies and a toy penalized trainer."};
  app.set_version_flag("--version", std::string(PARITY_METER_VERSION));
  app.require_subcommand(1);

  std::function<int()> action;
  auto pair_option = [](CLI::App* cmd, std::vector<GroupId>& values) {
    return cmd->add_option("--pair", values, "group ids g0 g1")->expected(2);
  };

  // report
  ReportOptions report;
  std::vector<GroupId> report_pair;
  std::optional<fs::path> report_output;
  bool report_all = false, report_table = false, report_json = false;
  auto* cmd_report = app.add_subcommand("report", "all metrics for a prediction file");
  cmd_report->add_option("--input", report.input, "CSV with y_pred, s and optional y_true")
      ->required();
  cmd_report->add_option("--threshold", report.threshold)->capture_default_str();
  cmd_report->add_option("--pdf-grid", report.pdf_grid)->capture_default_str();
  cmd_report->add_option("--cdf-grid", report.cdf_grid)->capture_default_str();
  cmd_report->add_option("--bandwidth", report.bandwidth, "scott, silverman or a number")
      ->capture_default_str();
  auto* report_pair_opt = pair_option(cmd_report, report_pair);
  cmd_report->add_flag("--all-pairs", report_all, "average over every group pair (default)")
      ->excludes(report_pair_opt);
  auto* table_flag = cmd_report->add_flag("--table", report_table);
  cmd_report->add_flag("--json", report_json, "(default)")->excludes(table_flag);
  cmd_report->add_option("--output", report_output, "file to write; stdout when omitted");
  cmd_report->callback([&] {
    report.pair = pair_from_flag(report_pair);
    report.format = report_table ? "table" : "json";
    action = [&] {
      Sink sink = Sink::single_file(report_output);
      return run_report(report, sink);
    };
  });

  // sweep
  SweepOptions sweep;
  std::vector<GroupId> sweep_pair;
  std::optional<fs::path> sweep_output;
  auto* cmd_sweep = app.add_subcommand("sweep", "threshold sweep of the thresholded gap");
  cmd_sweep->add_option("--input", sweep.input)->required();
  cmd_sweep->add_option("--steps", sweep.steps)->capture_default_str();
  cmd_sweep->add_option("--cdf-grid", sweep.cdf_grid)->capture_default_str();
  pair_option(cmd_sweep, sweep_pair);
  cmd_sweep->add_option("--output", sweep_output, "CSV file; stdout when omitted");
  cmd_sweep->add_flag("--check", sweep.check, "exit 4 when the verdict fails");
  cmd_sweep->callback([&] {
    sweep.pair = pair_from_flag(sweep_pair);
    action = [&] {
      Sink sink = Sink::single_file(sweep_output);
      return run_sweep(sweep, sink);
    };
  });

  // density
  DensityOptions density;
  fs::path density_dir = ".";
  auto* cmd_density = app.add_subcommand("density", "per-group PDF and CDF curves");
  cmd_density->add_option("--input", density.input)->required();
  cmd_density->add_option("--grid", density.grid)->capture_default_str();
  cmd_density->add_option("--bandwidth", density.bandwidth)->capture_default_str();
  cmd_density->add_option("--out-dir", density_dir)->capture_default_str();
  cmd_density->callback([&] {
    action = [&] {
      Sink sink = Sink::directory(density_dir);
      return run_density(density, sink);
    };
  });

  // bias-density
  BiasDensityOptions bias;
  std::vector<GroupId> bias_pair;
  fs::path bias_dir = ".";
  auto* cmd_bias = app.add_subcommand("bias-density", "optimal coupling and bias density");
  cmd_bias->add_option("--input", bias.input)->required();
  pair_option(cmd_bias, bias_pair);
  cmd_bias->add_option("--resolution", bias.resolution, "quantile levels")
      ->capture_default_str();
  cmd_bias->add_option("--bins", bias.bins)->capture_default_str();
  cmd_bias->add_option("--construction", bias.construction, "quantile or sorted")
      ->capture_default_str();
  cmd_bias->add_flag("--svg", bias.svg, "also write bias_density.svg");
  cmd_bias->add_option("--out-dir", bias_dir)->capture_default_str();
  cmd_bias->callback([&] {
    bias.pair = pair_from_flag(bias_pair);
    action = [&] {
      Sink sink = Sink::directory(bias_dir);
      return run_bias_density(bias, sink);
    };
  });

  // synth
  SynthFlags synth_flags;
  fs::path synth_dir = ".";
  auto* cmd_synth = app.add_subcommand("synth", "generate two-group predictions");
  synth_flags.add_to(cmd_synth);
  cmd_synth->add_option("--out-dir", synth_dir)->capture_default_str();
  cmd_synth->callback([&] {
    action = [&] {
      Sink sink = Sink::directory(synth_dir);
      return run_synth({synth_flags.spec()}, synth_flags.inputs(), sink);
    };
  });

  // convergence
  SynthFlags conv_flags;
  ConvergenceCliOptions conv;
  std::vector<std::string> conv_metrics{"abpc", "abcc", "mi"};
  bool conv_abs = false;
  fs::path conv_dir = ".";
  auto* cmd_conv = app.add_subcommand("convergence", "estimation error against ground truth");
  conv_flags.add_to(cmd_conv);
  cmd_conv->add_option("--n-values", conv.run.n_values)->delimiter(',')->capture_default_str();
  cmd_conv->add_option("--trials", conv.run.trials)->capture_default_str();
  cmd_conv->add_option("--metrics", conv_metrics)->delimiter(',')->capture_default_str();
  cmd_conv->add_flag("--abs-error", conv_abs, "absolute instead of relative error");
  cmd_conv->add_flag("--check", conv.check, "exit 4 when an ordering or slope check fails");
  cmd_conv->add_option("--out-dir", conv_dir)->capture_default_str();
  cmd_conv->callback([&] {
    action = [&] {
      conv.spec = conv_flags.spec();
      conv.run.relative_error = !conv_abs;
      conv.run.metrics.clear();
      for (const auto& m : conv_metrics) conv.run.metrics.push_back(parse_estimated_metric(m));
      Sink sink = Sink::directory(conv_dir);
      return run_convergence(conv, conv_flags.inputs(), sink);
    };
  });

  // train-toy
  TrainOptions train_opts;
  bool no_halving = false;
  fs::path train_dir = ".";
  auto* cmd_train = app.add_subcommand("train-toy", "logistic model with a fairness penalty");
  cmd_train->add_option("--input", train_opts.input, "CSV with x0.., y_true, s")->required();
  cmd_train->add_option("--penalty", train_opts.penalty, "none, dpc or abpc")
      ->capture_default_str();
  cmd_train->add_option("--lambda", train_opts.lambda)->capture_default_str();
  cmd_train->add_option("--bandwidth", train_opts.bandwidth, "abpc penalty bandwidth")
      ->capture_default_str();
  cmd_train->add_option("--grid", train_opts.grid, "abpc penalty grid")->capture_default_str();
  cmd_train->add_option("--lr", train_opts.learning_rate)->capture_default_str();
  cmd_train->add_option("--epochs", train_opts.epochs)->capture_default_str();
  cmd_train->add_option("--seed", train_opts.seed)->capture_default_str();
  cmd_train->add_option("--report-every", train_opts.report_every)->capture_default_str();
  cmd_train->add_flag("--no-halving", no_halving, "keep the step size fixed");
  cmd_train->add_option("--out-dir", train_dir)->capture_default_str();
  cmd_train->callback([&] {
    train_opts.halving = !no_halving;
    action = [&] {
      Sink sink = Sink::directory(train_dir);
      return run_train(train_opts, sink);
    };
  });

  // synth-train
  SynthTrainOptions st;
  fs::path st_dir = ".";
  auto* cmd_st = app.add_subcommand("synth-train", "biased training fixture for train-toy");
  cmd_st->add_option("--n-per-group", st.n_per_group)->capture_default_str();
  cmd_st->add_option("--seed", st.seed)->capture_default_str();
  cmd_st->add_option("--out-dir", st_dir)->capture_default_str();
  cmd_st->callback([&] {
    action = [&] {
      Sink sink = Sink::directory(st_dir);
      return run_synth_train(st, sink);
    };
  });

  // replay
  std::string replay_manifest;
  fs::path replay_dir = ".";
  bool replay_check = false;
  auto* cmd_replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  cmd_replay->add_option("manifest", replay_manifest)->required();
  cmd_replay->add_option("--out-dir", replay_dir)->capture_default_str();
  cmd_replay->add_flag("--check", replay_check, "exit 4 unless outputs match the manifest");
  cmd_replay->callback([&] {
    action = [&] { return run_replay(replay_manifest, replay_dir, replay_check); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const InputError& e) {
    std::cerr << "parity_meter: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "parity_meter: " << e.what() << '\n';
    return 3;
  } catch (const CLI::Error& e) {
    std::cerr << "parity_meter: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "parity_meter: " << e.what() << '\n';
    return 1;
  }
}
