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
// Logistic model trained by full-batch gradient descent on
//
//   mean binary cross-entropy + lambda * penalty
//
// where the penalty is a smoothed |mean_0 - mean_1| of predictions or a
// fixed-bandwidth KDE estimate of int |f0 - f1|. Both are smooth in the
// predictions; |u| is softened to sqrt(u^2 + 1e-12).

#ifndef PARITY_METER_OPTIM_HPP_
#define PARITY_METER_OPTIM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "parity_meter/core.hpp"
#include "parity_meter/metrics.hpp"

namespace parity {

inline constexpr double kSmoothAbsEpsilon = 1e-12;

struct ToyModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  Eigen::VectorXd logits(const Eigen::MatrixXd& features) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
};

enum class PenaltyKind { kNone, kDeltaDpC, kAbpcKde };

struct Penalty {
  PenaltyKind kind = PenaltyKind::kNone;
  double lambda = 0.0;
  double bandwidth = 0.05;     // kAbpcKde only
  Eigen::Index grid = 200;     // kAbpcKde only
  GroupPair groups{0, 1};

  static Penalty none() { return {}; }
  static Penalty delta_dp_c(double lambda) {
    return {PenaltyKind::kDeltaDpC, lambda};
  }
  static Penalty abpc_kde(double lambda, double bandwidth = 0.05,
                          Eigen::Index grid = 200) {
    return {PenaltyKind::kAbpcKde, lambda, bandwidth, grid};
  }

  // ConfigError unless lambda >= 0, bandwidth > 0 and grid >= 2.
  void validate() const;
};

// Labelled feature rows with group ids.
struct Batch {
  Eigen::MatrixXd features;  // one row per sample
  Eigen::VectorXi labels;
  std::vector<GroupId> groups;

  Eigen::Index size() const { return features.rows(); }
};

struct LossGrad {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double penalty = 0.0;  // before lambda
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

// Exact loss and analytic gradient. GroupError when a penalty is active and
// one of its groups is absent from the batch; SizeError on an empty or ragged
// batch.
LossGrad loss_and_grad(const ToyModel& model, const Batch& batch,
                       const Penalty& penalty);

struct TrainConfig {
  Penalty penalty;
  double learning_rate = 0.5;
  int epochs = 300;
  std::uint64_t seed = 0;
  // Reject a step that raises the loss and halve the learning rate.
  bool halve_on_increase = true;
  // Metrics are recorded every `report_every` epochs and at the last one.
  int report_every = 1;
  MetricConfig metrics;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double learning_rate = 0.0;
  MetricReport report;
};

struct TrainResult {
  ToyModel model;
  std::vector<EpochRecord> trajectory;
};

// DivergenceError (with the epoch) when the loss becomes non-finite.
TrainResult train(const Batch& batch, const TrainConfig& cfg);

// Feature columns x0..x{d-1} (consecutive from x0), y_true and s.
Batch read_training_csv(std::istream& in);
void write_training_csv(std::ostream& out, const Batch& batch);

// CSV epoch,loss,acc,delta_dp_c,abpc,abcc
void write_trajectory_csv(std::ostream& out,
                          const std::vector<EpochRecord>& trajectory);

// Three features, all predictive of the label: x0 is shifted between the
// groups, x1 has the same law in both, x2 has mean zero in both but a much
// wider spread in group 1. Equal mean predictions are reachable through x2
// with clearly different prediction distributions; equal distributions need
// x1 alone.
Batch make_biased_fixture(Eigen::Index n_per_group, std::uint64_t seed);

}  // namespace parity

#endif  // PARITY_METER_OPTIM_HPP_
