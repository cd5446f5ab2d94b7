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
// One-dimensional optimal transport between two groups' predictions. In 1-D
// the monotone (quantile) coupling is optimal for the |x - y| cost, so
//
//   W1 = int |F0(x) - F1(x)| dx = int_0^1 |F0^-1(u) - F1^-1(u)| du,
//
// and the per-cell cost |x - y| * mass of that coupling is the bias density.

#ifndef PARITY_METER_TRANSPORT_HPP_
#define PARITY_METER_TRANSPORT_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "parity_meter/core.hpp"
#include "parity_meter/density.hpp"

namespace parity {

struct Coupling {
  double source = 0.0;
  double target = 0.0;
  double mass = 0.0;
};

enum class PlanConstruction { kQuantileGrid, kSortedMatch };

struct TransportPlan {
  std::vector<Coupling> couplings;  // ascending in source, then target
  PlanConstruction construction = PlanConstruction::kQuantileGrid;
  Eigen::Index resolution = 0;  // quantile levels, or N for sorted matching

  // sum |x - y| * mass
  double cost() const;
};

struct BiasCell {
  double source = 0.0;
  double target = 0.0;
  double rho = 0.0;
};

struct BiasDensity {
  std::vector<BiasCell> cells;
  double total = 0.0;
};

// rho accumulated on a bins x bins grid over [0,1]^2; row = source bin.
struct BiasHeatmap {
  Eigen::MatrixXd rho;
  Eigen::MatrixXd mass;
};

// Exact W1 between two step CDFs: integral of |F0 - F1| summed in closed form
// over the merged breakpoints, no grid.
double wasserstein1(const EmpiricalCdf& cdf0, const EmpiricalCdf& cdf1);

// Couples F0^-1(u_k) with F1^-1(u_k) at u_k = (k + 1/2)/resolution, mass
// 1/resolution each; identical consecutive cells are merged.
// ConfigError when resolution < 2.
TransportPlan quantile_plan(const GroupView& view0, const GroupView& view1,
                            Eigen::Index resolution);

// Pairs the i-th smallest of each group with mass 1/N. SizeError on unequal
// group sizes.
TransportPlan sorted_match_plan(const GroupView& view0, const GroupView& view1);

TransportPlan optimal_plan(const GroupView& view0, const GroupView& view1,
                           PlanConstruction construction,
                           Eigen::Index resolution = 1000);

BiasDensity bias_density(const TransportPlan& plan);

// ConfigError when bins < 1.
BiasHeatmap bin_bias_density(const TransportPlan& plan, Eigen::Index bins);

// int |f0 - f1| and m0 + m1 - 2 int min(f0, f1) on the same grid, with m_i the
// trapezoid mass of f_i over [0,1].
struct OverlapIdentity {
  double direct = 0.0;
  double via_min = 0.0;
};
OverlapIdentity overlap_identity(const DensityEstimate& f0,
                                 const DensityEstimate& f1,
                                 Eigen::Index grid_points);

// Same pair for the renormalized densities f_i / m_i, where the via-min form
// is the transport cost under c(x, y) = 2 * 1[x != y]:
//   2 * (1 - int min(f0/m0, f1/m1)).
OverlapIdentity indicator_cost_identity(const DensityEstimate& f0,
                                        const DensityEstimate& f1,
                                        Eigen::Index grid_points);

// CSV x,y,mass
void write_plan_csv(std::ostream& out, const TransportPlan& plan);
// CSV x_bin,y_bin,rho over every bin, row-major in source bin.
void write_heatmap_csv(std::ostream& out, const BiasHeatmap& heatmap);
// Standalone SVG, fixed 10-step sequential ramp scaled to the largest bin.
void write_heatmap_svg(std::ostream& out, const BiasHeatmap& heatmap);

}  // namespace parity

#endif  // PARITY_METER_TRANSPORT_HPP_
