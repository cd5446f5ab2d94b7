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
// Per-group density and distribution estimates: Gaussian-kernel KDE and the
// empirical distribution function.

#ifndef PARITY_METER_DENSITY_HPP_
#define PARITY_METER_DENSITY_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "parity_meter/core.hpp"

namespace parity {

enum class BandwidthRule { kScott, kSilverman, kFixed };

struct KdeConfig {
  BandwidthRule rule = BandwidthRule::kScott;
  double fixed_bandwidth = 0.0;  // used only by kFixed

  static KdeConfig scott() { return {}; }
  static KdeConfig silverman() { return {BandwidthRule::kSilverman, 0.0}; }
  // ConfigError unless h > 0 and finite.
  static KdeConfig fixed(double h);

  // "scott", "silverman" or a positive number.
  static KdeConfig parse(const std::string& text);
  std::string to_string() const;
};

// Gaussian kernel mixture (1/(N h)) * sum_n phi((x - y_n) / h), no boundary
// correction. Evaluation sums every kernel; terms whose exponent underflows
// to exactly zero are skipped, which leaves the sum bit-identical.
class DensityEstimate {
 public:
  DensityEstimate(GroupId group_id, Eigen::VectorXd samples, double bandwidth);

  GroupId group_id() const { return group_id_; }
  Eigen::Index sample_count() const { return sorted_.size(); }
  double bandwidth() const { return bandwidth_; }
  const Eigen::VectorXd& sorted_samples() const { return sorted_; }

  double evaluate(double x) const;
  double operator()(double x) const { return evaluate(x); }
  // Pointwise evaluation, parallel over points.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xs) const;

 private:
  GroupId group_id_;
  Eigen::VectorXd sorted_;
  double bandwidth_;
};

// Right-continuous step function F(x) = |{n : y_n <= x}| / N.
class EmpiricalCdf {
 public:
  EmpiricalCdf(GroupId group_id, Eigen::VectorXd samples);

  GroupId group_id() const { return group_id_; }
  Eigen::Index sample_count() const { return sorted_.size(); }
  const Eigen::VectorXd& sorted_values() const { return sorted_; }

  double evaluate(double x) const;
  double operator()(double x) const { return evaluate(x); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xs) const;

  // Left-continuous generalized inverse: smallest sample v with F(v) >= u,
  // for u in (0, 1].
  double quantile(double u) const;

 private:
  GroupId group_id_;
  Eigen::VectorXd sorted_;
};

// Resolved bandwidth for a sample under the rule. Scott: sd * N^(-1/5),
// Silverman: sd * (4 / (3N))^(1/5), sd with the N-1 divisor.
// DegenerateError when N < 2 or sd == 0 under a data-driven rule.
double resolve_bandwidth(const Eigen::VectorXd& samples, const KdeConfig& cfg);

DensityEstimate fit_kde(const GroupView& view, const KdeConfig& cfg);
EmpiricalCdf fit_ecdf(const GroupView& view);

struct Curve {
  Eigen::VectorXd x;
  Eigen::VectorXd value;
};

// Evaluates on the uniform grid x_k = k/(M-1); ConfigError when M < 2.
Curve sample_curve(const DensityEstimate& f, Eigen::Index grid_points);
Curve sample_curve(const EmpiricalCdf& f, Eigen::Index grid_points);

// CSV columns x,value.
void write_curve_csv(std::ostream& out, const Curve& curve);

}  // namespace parity

#endif  // PARITY_METER_DENSITY_HPP_
