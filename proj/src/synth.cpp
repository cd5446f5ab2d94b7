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

#include "parity_meter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "parity_meter/csv.hpp"
#include "parity_meter/numeric.hpp"
#include "parity_meter/random.hpp"

namespace parity {
namespace {

constexpr double kNegligibleTruncation = 1e-9;

double mass_in_unit_interval(const NormalComponent& c) {
  return standard_normal_cdf((1.0 - c.mean) / c.sd) -
         standard_normal_cdf((0.0 - c.mean) / c.sd);
}

bool truncation_negligible(const Distribution& d) {
  for (const auto& c : d.components) {
    if (1.0 - mass_in_unit_interval(c) > kNegligibleTruncation) return false;
  }
  return true;
}

bool equal_sd_normal_pair(const SynthSpec& spec) {
  return spec.dist0.is_single_normal() && spec.dist1.is_single_normal() &&
         spec.dist0.components[0].sd == spec.dist1.components[0].sd;
}

double draw(const Distribution& d, bool sigmoid, Random& rng) {
  const NormalComponent* comp = &d.components.back();
  if (d.components.size() > 1) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& c : d.components) {
      acc += c.weight;
      if (u < acc) {
        comp = &c;
        break;
      }
    }
  }
  if (sigmoid) return logistic(rng.normal(comp->mean, comp->sd));
  while (true) {
    const double z = rng.normal(comp->mean, comp->sd);
    if (z >= 0.0 && z <= 1.0) return z;
  }
}

// Exact density and CDF of the generated predictions on [0,1].
class PredictionLaw {
 public:
  PredictionLaw(const Distribution& d, bool sigmoid) : d_(d), sigmoid_(sigmoid) {
    if (!sigmoid_) {
      lo_ = d_.cdf(0.0);
      mass_ = d_.cdf(1.0) - lo_;
    }
  }

  double pdf(double x) const {
    if (sigmoid_) {
      if (x <= 0.0 || x >= 1.0) return 0.0;
      return d_.pdf(std::log(x / (1.0 - x))) / (x * (1.0 - x));
    }
    return d_.pdf(x) / mass_;
  }

  double cdf(double x) const {
    if (sigmoid_) {
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return d_.cdf(std::log(x / (1.0 - x)));
    }
    return (d_.cdf(x) - lo_) / mass_;
  }

 private:
  const Distribution& d_;
  bool sigmoid_;
  double lo_ = 0.0;
  double mass_ = 1.0;
};

nlohmann::ordered_json distribution_json(const Distribution& d) {
  if (d.is_single_normal()) {
    return {{"normal", {d.components[0].mean, d.components[0].sd}}};
  }
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const auto& c : d.components) comps.push_back({c.weight, c.mean, c.sd});
  return {{"mixture", comps}};
}

Distribution distribution_from_json(const nlohmann::json& doc) {
  if (doc.contains("normal")) {
    const auto& p = doc.at("normal");
    return Distribution::normal(p.at(0).get<double>(), p.at(1).get<double>());
  }
  if (doc.contains("mixture")) {
    Distribution d;
    for (const auto& c : doc.at("mixture")) {
      d.components.push_back(
          {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
    }
    return d;
  }
  throw ConfigError("distribution needs a 'normal' or 'mixture' entry");
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double Distribution::pdf(double z) const {
  double total = 0.0;
  for (const auto& c : components) {
    total += c.weight * standard_normal_pdf((z - c.mean) / c.sd) / c.sd;
  }
  return total;
}

double Distribution::cdf(double z) const {
  double total = 0.0;
  for (const auto& c : components) {
    total += c.weight * standard_normal_cdf((z - c.mean) / c.sd);
  }
  return total;
}

void SynthSpec::validate() const {
  for (const Distribution* d : {&dist0, &dist1}) {
    if (d->components.empty()) throw ConfigError("distribution has no components");
    double total = 0.0;
    for (const auto& c : d->components) {
      if (!(c.sd > 0.0) || !std::isfinite(c.sd) || !std::isfinite(c.mean)) {
        throw ConfigError("component sd must be positive and finite");
      }
      if (!(c.weight > 0.0)) throw ConfigError("mixture weights must be positive");
      if (!map_through_sigmoid && mass_in_unit_interval(c) < 1e-6) {
        throw ConfigError("component has no mass in [0,1]; enable the sigmoid map");
      }
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  }
  if (n_per_group < 2) throw ConfigError("n_per_group must be at least 2");
}

SynthSpec synth_spec_from_json(const nlohmann::json& doc) {
  SynthSpec spec;
  try {
    if (doc.contains("dist0")) spec.dist0 = distribution_from_json(doc.at("dist0"));
    if (doc.contains("dist1")) spec.dist1 = distribution_from_json(doc.at("dist1"));
    spec.map_through_sigmoid = doc.value("sigmoid", spec.map_through_sigmoid);
    spec.n_per_group = doc.value("n_per_group", spec.n_per_group);
    spec.seed = doc.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid synth config: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json to_json(const SynthSpec& spec) {
  return {{"dist0", distribution_json(spec.dist0)},
          {"dist1", distribution_json(spec.dist1)},
          {"sigmoid", spec.map_through_sigmoid},
          {"n_per_group", spec.n_per_group},
          {"seed", spec.seed}};
}

PredictionSet generate(const SynthSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.n_per_group;
  Eigen::VectorXd predictions(2 * n);
  std::vector<GroupId> groups(static_cast<std::size_t>(2 * n));
  const Distribution* dists[2] = {&spec.dist0, &spec.dist1};
  for (int g = 0; g < 2; ++g) {
    Random rng(mix_seed(spec.seed, static_cast<std::uint64_t>(g)));
    for (Eigen::Index i = 0; i < n; ++i) {
      predictions[g * n + i] = draw(*dists[g], spec.map_through_sigmoid, rng);
      groups[static_cast<std::size_t>(g * n + i)] = g;
    }
  }
  return PredictionSet(std::move(predictions), std::move(groups));
}

const char* to_string(TruthMethod method) {
  return method == TruthMethod::kAnalytic ? "analytic" : "numeric";
}

GroundTruth ground_truth(const SynthSpec& spec, const GroundTruthOptions& options) {
  spec.validate();
  GroundTruth truth;
  const bool pair = equal_sd_normal_pair(spec);
  const bool untruncated = truncation_negligible(spec.dist0) &&
                           truncation_negligible(spec.dist1);
  const bool abpc_analytic =
      options.prefer_analytic && pair && (spec.map_through_sigmoid || untruncated);
  const bool abcc_analytic =
      options.prefer_analytic && pair && !spec.map_through_sigmoid && untruncated;

  if (abpc_analytic) {
    const double sd = spec.dist0.components[0].sd;
    const double shift =
        std::abs(spec.dist0.components[0].mean - spec.dist1.components[0].mean);
    truth.abpc = 2.0 * (2.0 * standard_normal_cdf(shift / (2.0 * sd)) - 1.0);
    truth.abpc_method = TruthMethod::kAnalytic;
  }
  if (abcc_analytic) {
    truth.abcc =
        std::abs(spec.dist0.components[0].mean - spec.dist1.components[0].mean);
    truth.abcc_method = TruthMethod::kAnalytic;
  }
  if (!options.allow_numeric) {
    if (!abpc_analytic || !abcc_analytic) {
      throw UnsupportedSpec(
          "no closed form for this spec and numeric integration is disabled");
    }
    // Mutual information has no closed form even for a normal pair.
    truth.mi = std::numeric_limits<double>::quiet_NaN();
    return truth;
  }
  if (options.grid < 2) throw ConfigError("ground truth grid must be at least 2");

  const PredictionLaw law0(spec.dist0, spec.map_through_sigmoid);
  const PredictionLaw law1(spec.dist1, spec.map_through_sigmoid);
  const Eigen::Index m = options.grid;
  const double step = 1.0 / static_cast<double>(m);
  double l1 = 0.0;
  double w1 = 0.0;
  double mi = 0.0;
  for (Eigen::Index k = 0; k <= m; ++k) {
    const double x = static_cast<double>(k) * step;
    const double weight = (k == 0 || k == m) ? 0.5 * step : step;
    const double f0 = law0.pdf(x);
    const double f1 = law1.pdf(x);
    l1 += weight * std::abs(f0 - f1);
    w1 += weight * std::abs(law0.cdf(x) - law1.cdf(x));
    const double mix = 0.5 * (f0 + f1);
    if (f0 > 0.0) mi += weight * 0.5 * f0 * std::log(f0 / mix);
    if (f1 > 0.0) mi += weight * 0.5 * f1 * std::log(f1 / mix);
  }
  if (!abpc_analytic) truth.abpc = l1;
  if (!abcc_analytic) truth.abcc = w1;
  truth.mi = std::max(0.0, mi);
  return truth;
}

const char* to_string(EstimatedMetric metric) {
  switch (metric) {
    case EstimatedMetric::kAbpc:
      return "abpc";
    case EstimatedMetric::kAbcc:
      return "abcc";
    case EstimatedMetric::kMi:
      return "mi";
  }
  return "abcc";
}

EstimatedMetric parse_estimated_metric(const std::string& name) {
  if (name == "abpc") return EstimatedMetric::kAbpc;
  if (name == "abcc") return EstimatedMetric::kAbcc;
  if (name == "mi") return EstimatedMetric::kMi;
  throw ConfigError("unknown metric '" + name + "' (expected abpc, abcc or mi)");
}

double ConvergenceReport::median(Eigen::Index n, EstimatedMetric metric) const {
  for (const auto& r : rows) {
    if (r.n == n && r.metric == metric) return r.median_error;
  }
  throw ConfigError("no convergence row for N=" + std::to_string(n));
}

double ConvergenceReport::slope(EstimatedMetric metric) const {
  for (const auto& s : slopes) {
    if (s.metric == metric) return s.slope;
  }
  throw ConfigError(std::string("no slope for ") + to_string(metric));
}

std::uint64_t trial_seed(std::uint64_t base, Eigen::Index n, int trial) {
  return mix_seed(mix_seed(base, static_cast<std::uint64_t>(n)),
                  static_cast<std::uint64_t>(trial));
}

ConvergenceReport convergence_experiment(const SynthSpec& spec,
                                         const ConvergenceOptions& options) {
  spec.validate();
  options.metric_config.validate();
  if (options.trials < 3) throw ConfigError("convergence needs at least 3 trials");
  if (options.n_values.empty() || options.metrics.empty()) {
    throw ConfigError("convergence needs N values and metrics");
  }
  for (std::size_t i = 0; i < options.n_values.size(); ++i) {
    if (options.n_values[i] < 10) throw ConfigError("every N must be at least 10");
    if (i > 0 && options.n_values[i] <= options.n_values[i - 1]) {
      throw ConfigError("N values must be strictly ascending");
    }
  }

  ConvergenceReport report;
  report.relative = options.relative_error;
  report.truth = ground_truth(spec);
  auto truth_of = [&](EstimatedMetric m) {
    switch (m) {
      case EstimatedMetric::kAbpc:
        return report.truth.abpc;
      case EstimatedMetric::kAbcc:
        return report.truth.abcc;
      case EstimatedMetric::kMi:
        return report.truth.mi;
    }
    return 0.0;
  };
  if (options.relative_error) {
    for (auto m : options.metrics) {
      if (truth_of(m) == 0.0) {
        throw DivisionError(std::string("ground-truth ") + to_string(m) +
                            " is zero; relative error is undefined, use "
                            "absolute error mode");
      }
    }
  }

  const std::size_t trials = static_cast<std::size_t>(options.trials);
  const std::size_t jobs = options.n_values.size() * trials;
  // errors[job][metric]
  std::vector<std::vector<double>> errors(jobs,
                                          std::vector<double>(options.metrics.size()));
  parallel_for(jobs, [&](std::size_t job) {
    const Eigen::Index n = options.n_values[job / trials];
    const int trial = static_cast<int>(job % trials);
    SynthSpec trial_spec = spec;
    trial_spec.n_per_group = n;
    trial_spec.seed = trial_seed(spec.seed, n, trial);
    const PredictionSet ps = generate(trial_spec);
    const PairMetrics est = pair_metrics(ps, {0, 1}, options.metric_config);
    for (std::size_t k = 0; k < options.metrics.size(); ++k) {
      const EstimatedMetric m = options.metrics[k];
      const double value = m == EstimatedMetric::kAbpc   ? est.abpc
                           : m == EstimatedMetric::kAbcc ? est.abcc
                                                         : est.mutual_information;
      const double truth = truth_of(m);
      double err = std::abs(value - truth);
      if (options.relative_error) err /= truth;
      errors[job][k] = err;
    }
  });

  for (std::size_t i = 0; i < options.n_values.size(); ++i) {
    for (std::size_t k = 0; k < options.metrics.size(); ++k) {
      std::vector<double> v;
      for (std::size_t t = 0; t < trials; ++t) v.push_back(errors[i * trials + t][k]);
      ConvergenceRow row;
      row.n = options.n_values[i];
      row.metric = options.metrics[k];
      row.trials = options.trials;
      row.mean_error = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).mean();
      row.median_error = median_of(std::move(v));
      report.rows.push_back(row);
    }
  }

  for (auto m : options.metrics) {
    Eigen::VectorXd lx(static_cast<Eigen::Index>(options.n_values.size()));
    Eigen::VectorXd ly(lx.size());
    for (std::size_t i = 0; i < options.n_values.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      lx[idx] = std::log(static_cast<double>(options.n_values[i]));
      ly[idx] = std::log(report.median(options.n_values[i], m));
    }
    ConvergenceSlope s;
    s.metric = m;
    if (lx.size() >= 2) {
      const Eigen::VectorXd cx = lx.array() - lx.mean();
      const Eigen::VectorXd cy = ly.array() - ly.mean();
      s.slope = cx.dot(cy) / cx.squaredNorm();
    }
    report.slopes.push_back(s);
  }
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << (report.relative ? "n,metric,median_rel_err,mean_rel_err,trials\n"
                          : "n,metric,median_abs_err,mean_abs_err,trials\n");
  for (const auto& r : report.rows) {
    out << r.n << ',' << to_string(r.metric) << ',' << format_double(r.median_error)
        << ',' << format_double(r.mean_error) << ',' << r.trials << '\n';
  }
}

nlohmann::ordered_json convergence_summary(const ConvergenceReport& report) {
  nlohmann::ordered_json slopes = nlohmann::ordered_json::object();
  for (const auto& s : report.slopes) slopes[to_string(s.metric)] = s.slope;
  return {{"error", report.relative ? "relative" : "absolute"},
          {"ground_truth",
           {{"abpc", report.truth.abpc},
            {"abpc_method", to_string(report.truth.abpc_method)},
            {"abcc", report.truth.abcc},
            {"abcc_method", to_string(report.truth.abcc_method)},
            {"mi_nats", report.truth.mi},
            {"mi_method", to_string(report.truth.mi_method)}}},
          {"slopes", slopes}};
}

}  // namespace parity
