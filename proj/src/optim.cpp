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

#include "parity_meter/optim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "parity_meter/csv.hpp"
#include "parity_meter/numeric.hpp"
#include "parity_meter/random.hpp"

namespace parity {
namespace {

double smooth_abs(double u) { return std::sqrt(u * u + kSmoothAbsEpsilon); }
double smooth_abs_slope(double u) { return u / smooth_abs(u); }

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// Per-sample coefficient +1/N0 for the first penalty group, -1/N1 for the
// second, 0 elsewhere.
Eigen::VectorXd group_contrast(const Batch& batch, GroupPair pair) {
  Eigen::Index n0 = 0;
  Eigen::Index n1 = 0;
  for (GroupId g : batch.groups) {
    n0 += g == pair.first ? 1 : 0;
    n1 += g == pair.second ? 1 : 0;
  }
  if (n0 == 0 || n1 == 0) {
    throw GroupError("fairness penalty needs both groups " +
                     std::to_string(pair.first) + " and " +
                     std::to_string(pair.second) + " in the batch");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(batch.size());
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    const GroupId g = batch.groups[static_cast<std::size_t>(i)];
    if (g == pair.first) a[i] = 1.0 / static_cast<double>(n0);
    if (g == pair.second) a[i] = -1.0 / static_cast<double>(n1);
  }
  return a;
}

// Penalty value and its gradient with respect to the predictions.
double delta_dp_c_penalty(const Eigen::VectorXd& p, const Eigen::VectorXd& contrast,
                          Eigen::VectorXd& grad_p) {
  const double gap = contrast.dot(p);
  grad_p = smooth_abs_slope(gap) * contrast;
  return smooth_abs(gap);
}

double abpc_kde_penalty(const Eigen::VectorXd& p, const Eigen::VectorXd& contrast,
                        const Penalty& penalty, Eigen::VectorXd& grad_p) {
  const double h = penalty.bandwidth;
  const Eigen::VectorXd x = linspace(penalty.grid);
  const Eigen::VectorXd w = trapezoid_weights(penalty.grid);
  // z(k, n) = (x_k - p_n) / h
  const Eigen::ArrayXXd z =
      (x.replicate(1, p.size()) - p.transpose().replicate(x.size(), 1)).array() / h;
  const Eigen::ArrayXXd phi =
      (-0.5 * z.square()).exp() / std::sqrt(2.0 * std::numbers::pi);
  const Eigen::VectorXd scale = contrast / h;
  // D_k = f0(x_k) - f1(x_k)
  const Eigen::VectorXd diff = phi.matrix() * scale;
  double value = 0.0;
  Eigen::VectorXd slope(diff.size());
  for (Eigen::Index k = 0; k < diff.size(); ++k) {
    value += w[k] * smooth_abs(diff[k]);
    slope[k] = w[k] * smooth_abs_slope(diff[k]);
  }
  // d phi((x - p)/h) / dp = z * phi / h
  grad_p = ((z * phi).matrix().transpose() * slope).cwiseProduct(scale) / h;
  return value;
}

PredictionSet training_predictions(const ToyModel& model, const Batch& batch) {
  return PredictionSet(model.predict(batch.features), batch.groups, batch.labels);
}

}  // namespace

Eigen::VectorXd ToyModel::logits(const Eigen::MatrixXd& features) const {
  return (features * weights).array() + bias;
}

Eigen::VectorXd ToyModel::predict(const Eigen::MatrixXd& features) const {
  return logits(features).unaryExpr([](double z) { return logistic(z); });
}

void Penalty::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("penalty lambda must be non-negative");
  }
  if (kind == PenaltyKind::kAbpcKde) {
    if (!(bandwidth > 0.0)) throw ConfigError("penalty bandwidth must be positive");
    if (grid < 2) throw ConfigError("penalty grid must be at least 2");
  }
}

LossGrad loss_and_grad(const ToyModel& model, const Batch& batch,
                       const Penalty& penalty) {
  penalty.validate();
  const Eigen::Index n = batch.size();
  if (n == 0) throw SizeError("empty batch");
  if (batch.labels.size() != n || static_cast<Eigen::Index>(batch.groups.size()) != n ||
      batch.features.cols() != model.weights.size()) {
    throw SizeError("batch and model dimensions disagree");
  }
  const Eigen::VectorXd z = model.logits(batch.features);
  const Eigen::VectorXd p = z.unaryExpr([](double v) { return logistic(v); });
  const Eigen::VectorXd y = batch.labels.cast<double>();
  const double inv_n = 1.0 / static_cast<double>(n);

  LossGrad out;
  double ce = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ce += softplus(z[i]) - y[i] * z[i];
  out.cross_entropy = ce * inv_n;
  Eigen::VectorXd grad_z = (p - y) * inv_n;

  if (penalty.kind != PenaltyKind::kNone) {
    const Eigen::VectorXd contrast = group_contrast(batch, penalty.groups);
    Eigen::VectorXd grad_p;
    out.penalty = penalty.kind == PenaltyKind::kDeltaDpC
                      ? delta_dp_c_penalty(p, contrast, grad_p)
                      : abpc_kde_penalty(p, contrast, penalty, grad_p);
    grad_z += penalty.lambda *
              grad_p.cwiseProduct((p.array() * (1.0 - p.array())).matrix());
  }
  out.loss = out.cross_entropy + penalty.lambda * out.penalty;
  out.grad_weights = batch.features.transpose() * grad_z;
  out.grad_bias = grad_z.sum();
  return out;
}

TrainResult train(const Batch& batch, const TrainConfig& cfg) {
  cfg.penalty.validate();
  cfg.metrics.validate();
  if (cfg.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (cfg.report_every < 1) throw ConfigError("report_every must be at least 1");

  TrainResult result;
  Random rng(cfg.seed);
  result.model.weights.resize(batch.features.cols());
  for (Eigen::Index j = 0; j < result.model.weights.size(); ++j) {
    result.model.weights[j] = rng.normal(0.0, 0.01);
  }
  result.model.bias = 0.0;

  auto record = [&](int epoch, double loss, double lr) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    rec.learning_rate = lr;
    rec.report = multi_group_report(training_predictions(result.model, batch),
                                    cfg.metrics);
    result.trajectory.push_back(std::move(rec));
  };

  double lr = cfg.learning_rate;
  LossGrad current = loss_and_grad(result.model, batch, cfg.penalty);
  if (!std::isfinite(current.loss)) throw DivergenceError("loss is not finite", 0);
  record(0, current.loss, lr);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    ToyModel candidate = result.model;
    candidate.weights -= lr * current.grad_weights;
    candidate.bias -= lr * current.grad_bias;
    LossGrad next = loss_and_grad(candidate, batch, cfg.penalty);
    if (!std::isfinite(next.loss) || !candidate.weights.allFinite()) {
      if (!cfg.halve_on_increase) {
        throw DivergenceError("loss is not finite at epoch " + std::to_string(epoch),
                              epoch);
      }
      next.loss = std::numeric_limits<double>::infinity();
    }
    if (cfg.halve_on_increase && next.loss > current.loss) {
      lr *= 0.5;
      if (lr == 0.0) {
        throw DivergenceError("learning rate underflow at epoch " +
                                  std::to_string(epoch),
                              epoch);
      }
    } else {
      result.model = std::move(candidate);
      current = std::move(next);
    }
    if (epoch % cfg.report_every == 0 || epoch == cfg.epochs) {
      record(epoch, current.loss, lr);
    }
  }
  return result;
}

Batch read_training_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const auto label_col = table.column("y_true");
  const auto group_col = table.column("s");
  if (!label_col) throw SchemaError("missing required column 'y_true'");
  if (!group_col) throw SchemaError("missing required column 's'");
  std::vector<std::size_t> feature_cols;
  while (auto c = table.column("x" + std::to_string(feature_cols.size()))) {
    feature_cols.push_back(*c);
  }
  if (feature_cols.empty()) throw SchemaError("missing feature column 'x0'");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  if (n == 0) throw SchemaError("training data has no rows");
  Batch batch;
  batch.features.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  batch.labels.resize(n);
  batch.groups.resize(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const auto v = parse_double(row[feature_cols[j]]);
      if (!v || !std::isfinite(*v)) {
        throw RangeError("row " + std::to_string(r) + ": bad feature x" +
                             std::to_string(j),
                         static_cast<long>(r));
      }
      batch.features(r, static_cast<Eigen::Index>(j)) = *v;
    }
    const auto label = parse_integer(row[*label_col]);
    if (!label || (*label != 0 && *label != 1)) {
      throw RangeError("row " + std::to_string(r) + ": y_true must be 0 or 1",
                       static_cast<long>(r));
    }
    batch.labels[r] = static_cast<int>(*label);
    const auto group = parse_integer(row[*group_col]);
    if (!group || *group < 0) {
      throw GroupError("row " + std::to_string(r) + ": bad group id");
    }
    batch.groups[static_cast<std::size_t>(r)] = *group;
  }
  return batch;
}

void write_training_csv(std::ostream& out, const Batch& batch) {
  for (Eigen::Index j = 0; j < batch.features.cols(); ++j) out << 'x' << j << ',';
  out << "y_true,s\n";
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    for (Eigen::Index j = 0; j < batch.features.cols(); ++j) {
      out << format_double(batch.features(i, j)) << ',';
    }
    out << batch.labels[i] << ',' << batch.groups[static_cast<std::size_t>(i)] << '\n';
  }
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<EpochRecord>& trajectory) {
  out << "epoch,loss,acc,delta_dp_c,abpc,abcc\n";
  for (const auto& rec : trajectory) {
    out << rec.epoch << ',' << format_double(rec.loss) << ','
        << (rec.report.acc ? format_double(*rec.report.acc) : std::string())
        << ',' << format_double(rec.report.delta_dp_c) << ','
        << format_double(rec.report.abpc) << ','
        << format_double(rec.report.abcc) << '\n';
  }
}

Batch make_biased_fixture(Eigen::Index n_per_group, std::uint64_t seed) {
  if (n_per_group < 1) throw ConfigError("fixture needs samples");
  Batch batch;
  const Eigen::Index n = 2 * n_per_group;
  batch.features.resize(n, 3);
  batch.labels.resize(n);
  batch.groups.resize(static_cast<std::size_t>(n));
  Random rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const GroupId g = i < n_per_group ? 0 : 1;
    const double shifted = rng.normal(g == 0 ? 0.0 : 1.0, 1.0);
    const double shared = rng.normal(0.0, 1.0);
    const double spread = rng.normal(0.0, g == 0 ? 0.5 : 2.0);
    const double noise = rng.normal(0.0, 0.5);
    batch.features(i, 0) = shifted;
    batch.features(i, 1) = shared;
    batch.features(i, 2) = spread;
    batch.labels[i] = shifted + 2.0 * shared + spread + noise > 0.5 ? 1 : 0;
    batch.groups[static_cast<std::size_t>(i)] = g;
  }
  return batch;
}

}  // namespace parity
