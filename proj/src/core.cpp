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

#include "parity_meter/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "parity_meter/csv.hpp"

namespace parity {

PredictionSet::PredictionSet(Eigen::VectorXd predictions,
                             std::vector<GroupId> groups,
                             std::optional<Eigen::VectorXi> labels)
    : predictions_(std::move(predictions)),
      groups_(std::move(groups)),
      labels_(std::move(labels)) {
  const auto n = predictions_.size();
  if (n < 1) throw SchemaError("prediction set is empty");
  if (static_cast<Eigen::Index>(groups_.size()) != n) {
    throw SchemaError("length mismatch: " + std::to_string(n) +
                      " predictions, " + std::to_string(groups_.size()) +
                      " group ids");
  }
  if (labels_ && labels_->size() != n) {
    throw SchemaError("length mismatch: " + std::to_string(n) +
                      " predictions, " + std::to_string(labels_->size()) +
                      " labels");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = predictions_[i];
    // Written so that NaN fails the check.
    if (!(p >= 0.0 && p <= 1.0)) {
      throw RangeError("row " + std::to_string(i) + ": prediction " +
                           format_double(p) + " outside [0,1]",
                       static_cast<long>(i));
    }
    if (labels_ && (*labels_)[i] != 0 && (*labels_)[i] != 1) {
      throw RangeError("row " + std::to_string(i) + ": label " +
                           std::to_string((*labels_)[i]) + " not in {0,1}",
                       static_cast<long>(i));
    }
    if (groups_[i] < 0) {
      throw GroupError("row " + std::to_string(i) + ": negative group id " +
                       std::to_string(groups_[i]));
    }
  }
  group_ids_ = groups_;
  std::sort(group_ids_.begin(), group_ids_.end());
  group_ids_.erase(std::unique(group_ids_.begin(), group_ids_.end()),
                   group_ids_.end());
  if (group_ids_.size() < 2) {
    throw GroupError("at least two distinct groups are required, found " +
                     std::to_string(group_ids_.size()));
  }
}

bool PredictionSet::contains_group(GroupId id) const {
  return std::binary_search(group_ids_.begin(), group_ids_.end(), id);
}

PredictionSet ingest(const Columns& rows) {
  const std::size_t n = rows.y_pred.size();
  if (rows.s.size() != n) {
    throw SchemaError("length mismatch: y_pred has " + std::to_string(n) +
                      " rows, s has " + std::to_string(rows.s.size()));
  }
  std::optional<Eigen::VectorXi> labels;
  if (rows.y_true) {
    if (rows.y_true->size() != n) {
      throw SchemaError("length mismatch: y_pred has " + std::to_string(n) +
                        " rows, y_true has " +
                        std::to_string(rows.y_true->size()));
    }
    labels = Eigen::Map<const Eigen::VectorXi>(rows.y_true->data(),
                                               static_cast<Eigen::Index>(n));
  }
  Eigen::VectorXd predictions = Eigen::Map<const Eigen::VectorXd>(
      rows.y_pred.data(), static_cast<Eigen::Index>(n));
  return PredictionSet(std::move(predictions), rows.s, std::move(labels));
}

std::vector<GroupView> split_groups(const PredictionSet& ps) {
  const auto& ids = ps.group_ids();
  std::vector<GroupView> views(ids.size());
  std::vector<std::vector<double>> values(ids.size());
  for (std::size_t g = 0; g < ids.size(); ++g) views[g].group_id = ids[g];
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    auto it = std::lower_bound(ids.begin(), ids.end(), ps.groups()[i]);
    const auto g = static_cast<std::size_t>(it - ids.begin());
    views[g].indices.push_back(i);
    values[g].push_back(ps.predictions()[i]);
  }
  for (std::size_t g = 0; g < ids.size(); ++g) {
    views[g].predictions = Eigen::Map<const Eigen::VectorXd>(
        values[g].data(), static_cast<Eigen::Index>(values[g].size()));
  }
  return views;
}

GroupView group_view(const PredictionSet& ps, GroupId id) {
  if (!ps.contains_group(id)) {
    throw GroupError("unknown group id " + std::to_string(id));
  }
  GroupView view;
  view.group_id = id;
  std::vector<double> values;
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    if (ps.groups()[i] == id) {
      view.indices.push_back(i);
      values.push_back(ps.predictions()[i]);
    }
  }
  view.predictions = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  return view;
}

PredictionSet read_predictions_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const auto pred_col = table.column("y_pred");
  const auto group_col = table.column("s");
  const auto label_col = table.column("y_true");
  if (!pred_col) throw SchemaError("missing required column 'y_pred'");
  if (!group_col) throw SchemaError("missing required column 's'");

  Columns cols;
  if (label_col) cols.y_true.emplace();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto pred = parse_double(row[*pred_col]);
    if (!pred) {
      throw SchemaError("row " + std::to_string(r) + ": unparseable y_pred '" +
                        row[*pred_col] + "'");
    }
    const auto group = parse_integer(row[*group_col]);
    if (!group) {
      throw SchemaError("row " + std::to_string(r) + ": unparseable s '" +
                        row[*group_col] + "'");
    }
    cols.y_pred.push_back(*pred);
    cols.s.push_back(*group);
    if (label_col) {
      const auto label = parse_integer(row[*label_col]);
      if (!label) {
        throw SchemaError("row " + std::to_string(r) +
                          ": unparseable y_true '" + row[*label_col] + "'");
      }
      cols.y_true->push_back(static_cast<int>(*label));
    }
  }
  return ingest(cols);
}

PredictionSet read_predictions_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return read_predictions_csv(in);
}

void write_predictions_csv(std::ostream& out, const PredictionSet& ps) {
  out << (ps.has_labels() ? "y_pred,y_true,s\n" : "y_pred,s\n");
  for (Eigen::Index i = 0; i < ps.size(); ++i) {
    out << format_double(ps.predictions()[i]) << ',';
    if (ps.has_labels()) out << (*ps.labels())[i] << ',';
    out << ps.groups()[i] << '\n';
  }
}

}  // namespace parity
