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

#include "parity_meter/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "parity_meter/csv.hpp"
#include "parity_meter/numeric.hpp"

namespace parity {
namespace {

// exp(-z*z/2) is exactly 0.0 in double precision beyond this |z|.
constexpr double kKernelCutoff = 38.7;

Eigen::VectorXd sorted_copy(Eigen::VectorXd v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

KdeConfig KdeConfig::fixed(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError("fixed bandwidth must be positive and finite, got " +
                      format_double(h));
  }
  return {BandwidthRule::kFixed, h};
}

KdeConfig KdeConfig::parse(const std::string& text) {
  if (text == "scott") return scott();
  if (text == "silverman") return silverman();
  const auto h = parse_double(text);
  if (!h) {
    throw ConfigError("bandwidth must be 'scott', 'silverman' or a number, got '" +
                      text + "'");
  }
  return fixed(*h);
}

std::string KdeConfig::to_string() const {
  switch (rule) {
    case BandwidthRule::kScott:
      return "scott";
    case BandwidthRule::kSilverman:
      return "silverman";
    case BandwidthRule::kFixed:
      return format_double(fixed_bandwidth);
  }
  return "scott";
}

DensityEstimate::DensityEstimate(GroupId group_id, Eigen::VectorXd samples,
                                 double bandwidth)
    : group_id_(group_id),
      sorted_(sorted_copy(std::move(samples))),
      bandwidth_(bandwidth) {
  if (sorted_.size() < 1) throw SizeError("density estimate needs samples");
  if (!(bandwidth_ > 0.0)) throw ConfigError("bandwidth must be positive");
}

double DensityEstimate::evaluate(double x) const {
  const double reach = kKernelCutoff * bandwidth_;
  const double* begin = sorted_.data();
  const double* end = begin + sorted_.size();
  const double* lo = std::lower_bound(begin, end, x - reach);
  const double* hi = std::upper_bound(lo, end, x + reach);
  double sum = 0.0;
  for (const double* p = lo; p != hi; ++p) {
    const double z = (x - *p) / bandwidth_;
    sum += std::exp(-0.5 * z * z);
  }
  const double norm = static_cast<double>(sorted_.size()) * bandwidth_ *
                      std::sqrt(2.0 * std::numbers::pi);
  return sum / norm;
}

Eigen::VectorXd DensityEstimate::evaluate(const Eigen::VectorXd& xs) const {
  Eigen::VectorXd out(xs.size());
  parallel_for(static_cast<std::size_t>(xs.size()), [&](std::size_t k) {
    out[static_cast<Eigen::Index>(k)] =
        evaluate(xs[static_cast<Eigen::Index>(k)]);
  });
  return out;
}

EmpiricalCdf::EmpiricalCdf(GroupId group_id, Eigen::VectorXd samples)
    : group_id_(group_id), sorted_(sorted_copy(std::move(samples))) {
  if (sorted_.size() < 1) throw SizeError("empirical CDF needs samples");
}

double EmpiricalCdf::evaluate(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) -
                     sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

Eigen::VectorXd EmpiricalCdf::evaluate(const Eigen::VectorXd& xs) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index k = 0; k < xs.size(); ++k) out[k] = evaluate(xs[k]);
  return out;
}

double EmpiricalCdf::quantile(double u) const {
  const auto n = sorted_.size();
  auto idx = static_cast<Eigen::Index>(std::ceil(u * static_cast<double>(n))) - 1;
  idx = std::clamp<Eigen::Index>(idx, 0, n - 1);
  return sorted_[idx];
}

double resolve_bandwidth(const Eigen::VectorXd& samples, const KdeConfig& cfg) {
  if (cfg.rule == BandwidthRule::kFixed) {
    if (!(cfg.fixed_bandwidth > 0.0)) {
      throw ConfigError("fixed bandwidth must be positive");
    }
    return cfg.fixed_bandwidth;
  }
  const auto n = samples.size();
  if (n < 2) {
    throw DegenerateError(
        "data-driven bandwidth needs at least 2 samples per group, got " +
        std::to_string(n) + "; use a fixed bandwidth");
  }
  const double sd = sample_std(samples);
  if (!(sd > 0.0)) {
    throw DegenerateError(
        "group predictions have zero variance; data-driven bandwidth is "
        "undefined, use a fixed bandwidth");
  }
  const double nd = static_cast<double>(n);
  if (cfg.rule == BandwidthRule::kScott) return sd * std::pow(nd, -0.2);
  return sd * std::pow(4.0 / (3.0 * nd), 0.2);
}

DensityEstimate fit_kde(const GroupView& view, const KdeConfig& cfg) {
  return DensityEstimate(view.group_id, view.predictions,
                         resolve_bandwidth(view.predictions, cfg));
}

EmpiricalCdf fit_ecdf(const GroupView& view) {
  return EmpiricalCdf(view.group_id, view.predictions);
}

namespace {

template <typename Estimate>
Curve sample_any(const Estimate& f, Eigen::Index grid_points) {
  if (grid_points < 2) {
    throw ConfigError("grid needs at least 2 points, got " +
                      std::to_string(grid_points));
  }
  Curve curve;
  curve.x = linspace(grid_points);
  curve.value = f.evaluate(curve.x);
  return curve;
}

}  // namespace

Curve sample_curve(const DensityEstimate& f, Eigen::Index grid_points) {
  return sample_any(f, grid_points);
}

Curve sample_curve(const EmpiricalCdf& f, Eigen::Index grid_points) {
  return sample_any(f, grid_points);
}

void write_curve_csv(std::ostream& out, const Curve& curve) {
  out << "x,value\n";
  for (Eigen::Index k = 0; k < curve.x.size(); ++k) {
    out << format_double(curve.x[k]) << ',' << format_double(curve.value[k])
        << '\n';
  }
}

}  // namespace parity
