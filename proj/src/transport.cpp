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

#include "parity_meter/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "parity_meter/csv.hpp"
#include "parity_meter/numeric.hpp"

namespace parity {
namespace {

// Light-to-dark sequential ramp, lowest level first.
constexpr std::array<const char*, 10> kRamp = {
    "#fff7ec", "#fee8c8", "#fdd49e", "#fdbb84", "#fc8d59",
    "#ef6548", "#d7301f", "#b30000", "#7f0000", "#400000"};

Eigen::VectorXd sorted_values(const GroupView& view) {
  Eigen::VectorXd v = view.predictions;
  std::sort(v.begin(), v.end());
  return v;
}

Eigen::Index bin_of(double v, Eigen::Index bins) {
  const auto b = static_cast<Eigen::Index>(std::floor(v * static_cast<double>(bins)));
  return std::clamp<Eigen::Index>(b, 0, bins - 1);
}

}  // namespace

double TransportPlan::cost() const {
  double total = 0.0;
  for (const auto& c : couplings) total += std::abs(c.source - c.target) * c.mass;
  return total;
}

double wasserstein1(const EmpiricalCdf& cdf0, const EmpiricalCdf& cdf1) {
  const Eigen::VectorXd& a = cdf0.sorted_values();
  const Eigen::VectorXd& b = cdf1.sorted_values();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  // Walk the merged breakpoints; between consecutive ones both CDFs are flat.
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double total = 0.0;
  double prev = std::min(a[0], b[0]);
  while (i < a.size() || j < b.size()) {
    const double next = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    const double gap = std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb);
    total += gap * (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
    prev = next;
  }
  return total;
}

TransportPlan quantile_plan(const GroupView& view0, const GroupView& view1,
                            Eigen::Index resolution) {
  if (resolution < 2) {
    throw ConfigError("quantile plan resolution must be at least 2, got " +
                      std::to_string(resolution));
  }
  const EmpiricalCdf f0(view0.group_id, view0.predictions);
  const EmpiricalCdf f1(view1.group_id, view1.predictions);
  TransportPlan plan;
  plan.construction = PlanConstruction::kQuantileGrid;
  plan.resolution = resolution;
  const double r = static_cast<double>(resolution);
  Eigen::Index run = 0;
  for (Eigen::Index k = 0; k < resolution; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / r;
    const double x = f0.quantile(u);
    const double y = f1.quantile(u);
    if (!plan.couplings.empty() && plan.couplings.back().source == x &&
        plan.couplings.back().target == y) {
      ++run;
    } else {
      if (!plan.couplings.empty()) {
        plan.couplings.back().mass = static_cast<double>(run) / r;
      }
      plan.couplings.push_back({x, y, 0.0});
      run = 1;
    }
  }
  plan.couplings.back().mass = static_cast<double>(run) / r;
  return plan;
}

TransportPlan sorted_match_plan(const GroupView& view0, const GroupView& view1) {
  if (view0.count() != view1.count()) {
    throw SizeError("sorted matching needs equal group sizes, got " +
                    std::to_string(view0.count()) + " and " +
                    std::to_string(view1.count()));
  }
  const Eigen::VectorXd a = sorted_values(view0);
  const Eigen::VectorXd b = sorted_values(view1);
  TransportPlan plan;
  plan.construction = PlanConstruction::kSortedMatch;
  plan.resolution = a.size();
  const double mass = 1.0 / static_cast<double>(a.size());
  plan.couplings.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    plan.couplings.push_back({a[i], b[i], mass});
  }
  return plan;
}

TransportPlan optimal_plan(const GroupView& view0, const GroupView& view1,
                           PlanConstruction construction,
                           Eigen::Index resolution) {
  if (construction == PlanConstruction::kSortedMatch) {
    return sorted_match_plan(view0, view1);
  }
  return quantile_plan(view0, view1, resolution);
}

BiasDensity bias_density(const TransportPlan& plan) {
  BiasDensity out;
  out.cells.reserve(plan.couplings.size());
  for (const auto& c : plan.couplings) {
    const double rho = std::abs(c.source - c.target) * c.mass;
    out.cells.push_back({c.source, c.target, rho});
    out.total += rho;
  }
  return out;
}

BiasHeatmap bin_bias_density(const TransportPlan& plan, Eigen::Index bins) {
  if (bins < 1) throw ConfigError("heatmap needs at least one bin");
  BiasHeatmap map;
  map.rho = Eigen::MatrixXd::Zero(bins, bins);
  map.mass = Eigen::MatrixXd::Zero(bins, bins);
  for (const auto& c : plan.couplings) {
    const auto row = bin_of(c.source, bins);
    const auto col = bin_of(c.target, bins);
    map.rho(row, col) += std::abs(c.source - c.target) * c.mass;
    map.mass(row, col) += c.mass;
  }
  return map;
}

OverlapIdentity overlap_identity(const DensityEstimate& f0,
                                 const DensityEstimate& f1,
                                 Eigen::Index grid_points) {
  if (grid_points < 2) throw ConfigError("grid needs at least 2 points");
  const Eigen::VectorXd x = linspace(grid_points);
  const Eigen::VectorXd a = f0.evaluate(x);
  const Eigen::VectorXd b = f1.evaluate(x);
  OverlapIdentity out;
  out.direct = trapezoid((a - b).cwiseAbs(), x);
  out.via_min = trapezoid(a, x) + trapezoid(b, x) - 2.0 * trapezoid(a.cwiseMin(b), x);
  return out;
}

OverlapIdentity indicator_cost_identity(const DensityEstimate& f0,
                                        const DensityEstimate& f1,
                                        Eigen::Index grid_points) {
  if (grid_points < 2) throw ConfigError("grid needs at least 2 points");
  const Eigen::VectorXd x = linspace(grid_points);
  Eigen::VectorXd a = f0.evaluate(x);
  Eigen::VectorXd b = f1.evaluate(x);
  a /= trapezoid(a, x);
  b /= trapezoid(b, x);
  OverlapIdentity out;
  out.direct = trapezoid((a - b).cwiseAbs(), x);
  out.via_min = 2.0 * (1.0 - trapezoid(a.cwiseMin(b), x));
  return out;
}

void write_plan_csv(std::ostream& out, const TransportPlan& plan) {
  out << "x,y,mass\n";
  for (const auto& c : plan.couplings) {
    out << format_double(c.source) << ',' << format_double(c.target) << ','
        << format_double(c.mass) << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, const BiasHeatmap& heatmap) {
  out << "x_bin,y_bin,rho\n";
  for (Eigen::Index i = 0; i < heatmap.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < heatmap.rho.cols(); ++j) {
      out << i << ',' << j << ',' << format_double(heatmap.rho(i, j)) << '\n';
    }
  }
}

void write_heatmap_svg(std::ostream& out, const BiasHeatmap& heatmap) {
  const Eigen::Index bins = heatmap.rho.rows();
  constexpr int kCell = 4;
  constexpr int kMargin = 40;
  const Eigen::Index side = bins * kCell;
  const double peak = heatmap.rho.maxCoeff();
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << side + 2 * kMargin << "\" height=\"" << side + 2 * kMargin << "\">\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << side
      << "\" height=\"" << side << "\" fill=\"" << kRamp[0] << "\"/>\n";
  for (Eigen::Index i = 0; i < bins; ++i) {
    for (Eigen::Index j = 0; j < bins; ++j) {
      const double v = heatmap.rho(i, j);
      if (!(v > 0.0) || !(peak > 0.0)) continue;
      const auto level = std::min<Eigen::Index>(
          9, static_cast<Eigen::Index>(std::floor(v / peak * 10.0)));
      // Source on the horizontal axis, target increasing upwards.
      out << "<rect x=\"" << kMargin + i * kCell << "\" y=\""
          << kMargin + (bins - 1 - j) * kCell << "\" width=\"" << kCell
          << "\" height=\"" << kCell << "\" fill=\"" << kRamp[static_cast<std::size_t>(level)]
          << "\"/>\n";
    }
  }
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin + side << "\" x2=\""
      << kMargin + side << "\" y2=\"" << kMargin
      << "\" stroke=\"#808080\" stroke-dasharray=\"4 4\"/>\n";
  out << "<text x=\"" << kMargin + side / 2 << "\" y=\"" << side + kMargin + 28
      << "\" text-anchor=\"middle\" font-size=\"12\">source prediction</text>\n";
  out << "<text x=\"14\" y=\"" << kMargin + side / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << kMargin + side / 2 << ")\">target prediction</text>\n";
  out << "</svg>\n";
}

}  // namespace parity
