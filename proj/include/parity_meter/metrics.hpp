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
// Demographic-parity metrics between two groups of predicted probabilities:
//
//   delta_dp_b  |P(y >= t | g0) - P(y >= t | g1)|        (thresholded rates)
//   delta_dp_c  |E[y | g0] - E[y | g1]|                  (mean probabilities)
//   abpc        int_0^1 |f0(x) - f1(x)| dx, f_i a Gaussian KDE, range [0,2]
//   abcc        int_0^1 |F0(x) - F1(x)| dx, F_i the empirical CDF, range [0,1]
//
// plus a KDE-based mutual information I(Y;S) and the accuracy metrics
// Acc/AP. Integrals use the trapezoid rule on uniform grids over [0,1].

#ifndef PARITY_METER_METRICS_HPP_
#define PARITY_METER_METRICS_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parity_meter/core.hpp"
#include "parity_meter/density.hpp"

namespace parity {

struct MetricConfig {
  double threshold = 0.5;
  Eigen::Index pdf_grid = 5000;
  Eigen::Index cdf_grid = 10000;
  KdeConfig kde = KdeConfig::scott();

  // ConfigError on a grid below 2 or a threshold outside [0,1].
  void validate() const;
};

struct PairMetrics {
  GroupPair pair{0, 0};
  double delta_dp_b = 0.0;
  double delta_dp_c = 0.0;
  double abpc = 0.0;
  double abcc = 0.0;
  double mutual_information = 0.0;
};

struct MetricReport {
  double delta_dp_b = 0.0;
  double delta_dp_c = 0.0;
  double abpc = 0.0;
  double abcc = 0.0;
  double mutual_information = 0.0;  // nats
  std::optional<double> acc;
  std::optional<double> ap;
  MetricConfig config;
  // Set for a single-pair report; empty means averaged over all pairs.
  std::optional<GroupPair> group_pair;
  std::vector<PairMetrics> pairs;
};

double delta_dp_b(const PredictionSet& ps, GroupPair pair, double threshold);
double delta_dp_c(const PredictionSet& ps, GroupPair pair);
double abpc(const PredictionSet& ps, GroupPair pair, const MetricConfig& cfg);
double abcc(const PredictionSet& ps, GroupPair pair, const MetricConfig& cfg);

// Estimate-level forms, for callers that already hold fitted estimates.
double abpc(const DensityEstimate& f0, const DensityEstimate& f1,
            Eigen::Index grid_points);
double abcc(const EmpiricalCdf& f0, const EmpiricalCdf& f1,
            Eigen::Index grid_points);

struct ThresholdSweep {
  Eigen::VectorXd t;
  Eigen::VectorXd delta_dp_b;
  // Trapezoid rule over the sweep grid.
  double integral = 0.0;
  // Exact integral of the piecewise-constant t -> delta_dp_b(t) over [0,1].
  double exact_integral = 0.0;
};

// delta_dp_b on a uniform grid of `steps` thresholds over [0,1].
ThresholdSweep threshold_sweep(const PredictionSet& ps, GroupPair pair,
                               Eigen::Index steps);
void write_sweep_csv(std::ostream& out, const ThresholdSweep& sweep);

// -int f ln f dx by the trapezoid rule on the grid; points with f < 1e-12
// contribute zero.
double differential_entropy(const Eigen::VectorXd& density,
                            const Eigen::VectorXd& x);

// I(Y;S) = H(Y) - sum_i P(S=i) H(Y|S=i) in nats, with f_{Y|S=i} the group
// KDE and f_Y the mixture sum_i P(S=i) f_{Y|S=i}, P(S=i) = N_i/(N_0+N_1).
// Clamped below at 0.
double mutual_information(const PredictionSet& ps, GroupPair pair,
                          const MetricConfig& cfg);

struct AccuracyMetrics {
  double acc = 0.0;
  double ap = 0.0;
};

// Acc = mean(1[y >= t] == label). AP = sum_n (R_n - R_{n-1}) P_n over the
// distinct predicted values in descending order. MissingLabelError without
// labels, MissingPositiveError when no label is 1.
AccuracyMetrics accuracy_metrics(const PredictionSet& ps, double threshold);
double accuracy(const PredictionSet& ps, double threshold);
double average_precision(const PredictionSet& ps);

// Every metric for one pair.
PairMetrics pair_metrics(const PredictionSet& ps, GroupPair pair,
                         const MetricConfig& cfg);

// Single-pair report with accuracy metrics when labels are present.
MetricReport pair_report(const PredictionSet& ps, GroupPair pair,
                         const MetricConfig& cfg);

// All C(m,2) unordered pairs in ascending id order, each metric averaged with
// equal weights. With two groups this is the single-pair report.
MetricReport multi_group_report(const PredictionSet& ps,
                                const MetricConfig& cfg);

// Stable JSON document, fixed key order, shortest round-trip floats.
std::string to_json(const MetricReport& report);
// Human-readable table.
std::string to_table(const MetricReport& report);

}  // namespace parity

#endif  // PARITY_METER_METRICS_HPP_
