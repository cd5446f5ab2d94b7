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
// Validated prediction data shared by every metric: per-sample predicted
// probability, optional binary label and a non-negative group id.

#ifndef PARITY_METER_CORE_HPP_
#define PARITY_METER_CORE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "parity_meter/errors.hpp"

namespace parity {

using GroupId = std::int64_t;
using GroupPair = std::pair<GroupId, GroupId>;

// Raw columnar records as they come off a file, before validation.
struct Columns {
  std::vector<double> y_pred;
  std::optional<std::vector<int>> y_true;
  std::vector<GroupId> s;
};

class PredictionSet {
 public:
  // Throws SchemaError on length mismatch, RangeError on a prediction outside
  // [0,1] (NaN/Inf included) or a label outside {0,1}, GroupError when fewer
  // than two distinct groups occur or an id is negative.
  PredictionSet(Eigen::VectorXd predictions, std::vector<GroupId> groups,
                std::optional<Eigen::VectorXi> labels = std::nullopt);

  Eigen::Index size() const { return predictions_.size(); }
  const Eigen::VectorXd& predictions() const { return predictions_; }
  const std::vector<GroupId>& groups() const { return groups_; }
  const std::optional<Eigen::VectorXi>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }

  // Distinct group ids, ascending.
  const std::vector<GroupId>& group_ids() const { return group_ids_; }
  bool contains_group(GroupId id) const;

 private:
  Eigen::VectorXd predictions_;
  std::vector<GroupId> groups_;
  std::optional<Eigen::VectorXi> labels_;
  std::vector<GroupId> group_ids_;
};

struct GroupView {
  GroupId group_id = 0;
  Eigen::VectorXd predictions;
  // Row indices into the parent set, ascending.
  std::vector<Eigen::Index> indices;

  Eigen::Index count() const { return predictions.size(); }
};

PredictionSet ingest(const Columns& rows);

// One view per distinct group id, ascending by id.
std::vector<GroupView> split_groups(const PredictionSet& ps);

// View of a single group; GroupError when the id does not occur.
GroupView group_view(const PredictionSet& ps, GroupId id);

// CSV with a header row. Recognized columns: y_pred, y_true (optional), s.
// Unknown columns are ignored.
PredictionSet read_predictions_csv(std::istream& in);
PredictionSet read_predictions_csv_file(const std::string& path);

// Writes y_pred[,y_true],s with shortest round-trip float formatting.
void write_predictions_csv(std::ostream& out, const PredictionSet& ps);

}  // namespace parity

#endif  // PARITY_METER_CORE_HPP_
