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
// Shared fixtures and brute-force oracles. Nothing here calls into the
// library's estimators.

#ifndef PARITY_METER_TESTS_FIXTURES_HPP_
#define PARITY_METER_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "parity_meter/core.hpp"
#include "parity_meter/random.hpp"

namespace parity::testing {

// Equal means, different shapes: group 0 mostly 0.4 with one outlier at 0.9,
// group 1 all at 0.5.
inline PredictionSet mean_gaming_set() {
  Eigen::VectorXd p(10);
  p << 0.4, 0.4, 0.4, 0.4, 0.5, 0.5, 0.5, 0.5, 0.5, 0.9;
  return PredictionSet(p, {0, 0, 0, 0, 1, 1, 1, 1, 1, 0});
}

// Interleaved groups whose thresholded gap depends on the threshold.
inline PredictionSet threshold_flip_set() {
  Eigen::VectorXd p(4);
  p << 0.35, 0.45, 0.55, 0.65;
  return PredictionSet(p, {0, 1, 0, 1});
}

inline PredictionSet from_groups(const std::vector<std::vector<double>>& groups) {
  std::vector<double> values;
  std::vector<GroupId> ids;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double v : groups[g]) {
      values.push_back(v);
      ids.push_back(static_cast<GroupId>(g));
    }
  }
  return PredictionSet(
      Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
      ids);
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Two groups of sizes n0, n1 with random beta-like shapes: a random mixture
// of clamped normals per group.
inline PredictionSet random_two_group_set(Random& rng, Eigen::Index n0,
                                          Eigen::Index n1) {
  std::vector<std::vector<double>> groups(2);
  for (int g = 0; g < 2; ++g) {
    const double mean = 0.15 + 0.7 * rng.uniform();
    const double sd = 0.03 + 0.2 * rng.uniform();
    const Eigen::Index n = g == 0 ? n0 : n1;
    for (Eigen::Index i = 0; i < n; ++i) {
      groups[static_cast<std::size_t>(g)].push_back(clamp01(rng.normal(mean, sd)));
    }
  }
  return from_groups(groups);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Brute-force count of values <= x.
inline double count_cdf(const std::vector<double>& values, double x) {
  double c = 0;
  for (double v : values) c += v <= x ? 1.0 : 0.0;
  return c / static_cast<double>(values.size());
}

// Exact int_0^1 |F0 - F1| by midpoint evaluation on every interval between
// merged breakpoints, using brute-force counting.
inline double exact_cdf_gap(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> br{0.0, 1.0};
  br.insert(br.end(), a.begin(), a.end());
  br.insert(br.end(), b.begin(), b.end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double mid = 0.5 * (br[i] + br[i + 1]);
    total += (br[i + 1] - br[i]) * std::abs(count_cdf(a, mid) - count_cdf(b, mid));
  }
  return total;
}

inline std::vector<double> group_values(const PredictionSet& ps, GroupId id) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    if (ps.groups()[static_cast<std::size_t>(i)] == id) out.push_back(ps.predictions()[i]);
  }
  return out;
}

}  // namespace parity::testing

#endif  // PARITY_METER_TESTS_FIXTURES_HPP_
