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

#include "parity_meter/binding.hpp"

#include "parity_meter/core.hpp"
#include "parity_meter/errors.hpp"

namespace parity::binding {
namespace {

PredictionSet to_set(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
                     const std::optional<std::vector<int>>& y_true = std::nullopt) {
  return ingest(Columns{y_pred, y_true, s});
}

GroupPair only_pair(const PredictionSet& ps) {
  const auto& ids = ps.group_ids();
  if (ids.size() != 2) {
    throw GroupError("expected exactly two groups, found " + std::to_string(ids.size()));
  }
  return {ids[0], ids[1]};
}

}  // namespace

MetricConfig BindingConfig::to_metric_config() const {
  MetricConfig cfg;
  cfg.kde = KdeConfig::parse(bw_method);
  cfg.pdf_grid = pdf_sample_n;
  cfg.cdf_grid = cdf_sample_n;
  cfg.threshold = threshold;
  cfg.validate();
  return cfg;
}

double abpc(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
            const BindingConfig& cfg) {
  const MetricConfig mc = cfg.to_metric_config();
  const PredictionSet ps = to_set(y_pred, s);
  return parity::abpc(ps, only_pair(ps), mc);
}

double abcc(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
            const BindingConfig& cfg) {
  const MetricConfig mc = cfg.to_metric_config();
  const PredictionSet ps = to_set(y_pred, s);
  return parity::abcc(ps, only_pair(ps), mc);
}

double delta_dp_b(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s,
                  double threshold) {
  BindingConfig cfg;
  cfg.threshold = threshold;
  const MetricConfig mc = cfg.to_metric_config();
  const PredictionSet ps = to_set(y_pred, s);
  return parity::delta_dp_b(ps, only_pair(ps), mc.threshold);
}

double delta_dp_c(const std::vector<double>& y_pred, const std::vector<std::int64_t>& s) {
  const PredictionSet ps = to_set(y_pred, s);
  return parity::delta_dp_c(ps, only_pair(ps));
}

std::map<std::string, double> report(const std::vector<double>& y_pred,
                                     const std::optional<std::vector<int>>& y_true,
                                     const std::vector<std::int64_t>& s,
                                     const BindingConfig& cfg) {
  const MetricReport r = multi_group_report(to_set(y_pred, s, y_true), cfg.to_metric_config());
  std::map<std::string, double> out{
      {"delta_dp_b", r.delta_dp_b}, {"delta_dp_c", r.delta_dp_c},
      {"abpc", r.abpc},             {"abcc", r.abcc},
      {"mutual_information", r.mutual_information},
  };
  if (r.acc) out["acc"] = *r.acc;
  if (r.ap) out["ap"] = *r.ap;
  return out;
}

}  // namespace parity::binding
