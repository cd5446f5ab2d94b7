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
// Synthetic two-group prediction data with known ground-truth metrics, and
// the estimation-error convergence experiment built on it.

#ifndef PARITY_METER_SYNTH_HPP_
#define PARITY_METER_SYNTH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "parity_meter/core.hpp"
#include "parity_meter/metrics.hpp"

namespace parity {

struct NormalComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
};

// Gaussian mixture; a single component is a plain normal.
struct Distribution {
  std::vector<NormalComponent> components;

  static Distribution normal(double mean, double sd) {
    return Distribution{{{1.0, mean, sd}}};
  }
  bool is_single_normal() const { return components.size() == 1; }

  double pdf(double z) const;
  double cdf(double z) const;
};

struct SynthSpec {
  Distribution dist0 = Distribution::normal(0.3, 0.1);
  Distribution dist1 = Distribution::normal(0.4, 0.1);
  // Logistic map into (0,1); otherwise samples are rejection-resampled into
  // [0,1] and ground truths use the truncated, renormalized densities.
  bool map_through_sigmoid = true;
  Eigen::Index n_per_group = 1000;
  std::uint64_t seed = 0;

  // ConfigError on non-positive sd or weights, weights not summing to 1,
  // n_per_group < 2, or (without sigmoid) a component with no mass in [0,1].
  void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const SynthSpec& spec);

// Group 0 rows first, then group 1. Deterministic in spec.seed.
PredictionSet generate(const SynthSpec& spec);

enum class TruthMethod { kAnalytic, kHighResolutionNumeric };
const char* to_string(TruthMethod method);

struct GroundTruth {
  double abpc = 0.0;
  double abcc = 0.0;
  double mi = 0.0;  // nats, balanced groups
  TruthMethod abpc_method = TruthMethod::kHighResolutionNumeric;
  TruthMethod abcc_method = TruthMethod::kHighResolutionNumeric;
  TruthMethod mi_method = TruthMethod::kHighResolutionNumeric;
};

struct GroundTruthOptions {
  bool prefer_analytic = true;
  bool allow_numeric = true;
  Eigen::Index grid = 1'000'000;  // intervals over [0,1]
};

// Analytic where a closed form is exact for the generated distribution:
//   ABPC, equal-sd normal pair: 2 * (2 Phi(|mu0 - mu1| / (2 sd)) - 1), with or
//     without the sigmoid map (invertible maps preserve the L1 distance);
//     without it only when truncation to [0,1] is negligible.
//   ABCC, equal-sd normal pair, no sigmoid, negligible truncation: |mu0 - mu1|.
// Everything else integrates the exact transformed densities and CDFs on a
// uniform grid. UnsupportedSpec when numeric integration is needed but
// disallowed; with numeric integration disabled mi is NaN.
GroundTruth ground_truth(const SynthSpec& spec,
                         const GroundTruthOptions& options = {});

enum class EstimatedMetric { kAbpc, kAbcc, kMi };
const char* to_string(EstimatedMetric metric);
EstimatedMetric parse_estimated_metric(const std::string& name);

struct ConvergenceRow {
  Eigen::Index n = 0;
  EstimatedMetric metric = EstimatedMetric::kAbcc;
  double median_error = 0.0;
  double mean_error = 0.0;
  int trials = 0;
};

struct ConvergenceSlope {
  EstimatedMetric metric = EstimatedMetric::kAbcc;
  double slope = 0.0;  // least squares of log(median error) on log(N)
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceSlope> slopes;
  GroundTruth truth;
  bool relative = true;

  double median(Eigen::Index n, EstimatedMetric metric) const;
  double slope(EstimatedMetric metric) const;
};

struct ConvergenceOptions {
  std::vector<Eigen::Index> n_values{100, 1000, 10000};
  int trials = 20;
  std::vector<EstimatedMetric> metrics{EstimatedMetric::kAbpc,
                                       EstimatedMetric::kAbcc,
                                       EstimatedMetric::kMi};
  bool relative_error = true;
  MetricConfig metric_config;
};

// Per-trial seed derived from the base seed, N and the trial index.
std::uint64_t trial_seed(std::uint64_t base, Eigen::Index n, int trial);

// For every (N, trial): fresh data, default-config estimates, error against
// ground truth. ConfigError on unsorted or too-small N values or fewer than 3
// trials; DivisionError when a requested relative error has zero truth.
ConvergenceReport convergence_experiment(const SynthSpec& spec,
                                         const ConvergenceOptions& options);

// CSV n,metric,median_rel_err,mean_rel_err,trials
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
nlohmann::ordered_json convergence_summary(const ConvergenceReport& report);

}  // namespace parity

#endif  // PARITY_METER_SYNTH_HPP_
