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
// Array-in / map-out facade for scripting-language bindings. Inputs are
// copied; every error is one of the core InputError/NumericError types and a
// binding maps them to its value-error type with the same message.
//
// The single-metric functions need exactly two groups and compare them in
// ascending id order. report() averages over all pairs when there are more.

#ifndef PARITY_METER_BINDING_HPP_
#define PARITY_METER_BINDING_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parity_meter/metrics.hpp"

namespace parity::binding {

struct BindingConfig {
  std::string bw_method = "scott";  // "scott", "silverman" or a number
  Eigen::Index pdf_sample_n = 5000;
  Eigen::Index cdf_sample_n = 10000;
  double threshold = 0.5;

  MetricConfig to_metric_config() const;
};

double abpc(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
            const BindingConfig& cfg = {});
double abcc(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
            const BindingConfig& cfg = {});
double delta_dp_b(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
                  double threshold = 0.5);
double delta_dp_c(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s);

// Keys: delta_dp_b, delta_dp_c, abpc, abcc, mutual_information, and acc/ap
// when labels are given.
std::map<std::string, double> report(const std::vector<double>& y_pred,
                                     const std::optional<std::vector<int>>& y_true,
                                     const std::vector<std::int64_t>& s,
                                     const BindingConfig& cfg = {});

}  // namespace parity::binding

#endif  // PARITY_METER_BINDING_HPP_
