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

#include "parity_meter/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "parity_meter/csv.hpp"
#include "parity_meter/numeric.hpp"

namespace parity {
namespace {

constexpr double kEntropyFloor = 1e-12;

// Fraction of sorted values >= t.
double positive_rate(const Eigen::VectorXd& sorted, double t) {
  const auto below =
      std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
  return 1.0 - static_cast<double>(below) / static_cast<double>(sorted.size());
}

Eigen::VectorXd sorted_predictions(const GroupView& view) {
  Eigen::VectorXd v = view.predictions;
  std::sort(v.begin(), v.end());
  return v;
}

void check_pair(const PredictionSet& ps, GroupPair pair) {
  for (GroupId id : {pair.first, pair.second}) {
    if (!ps.contains_group(id)) {
      throw GroupError("unknown group id " + std::to_string(id));
    }
  }
}

// Per-group quantities reused across every pair a group takes part in.
struct GroupStats {
  GroupId id = 0;
  double count = 0.0;
  double mean = 0.0;
  double rate = 0.0;
  EmpiricalCdf cdf;
  Eigen::VectorXd pdf;  // KDE sampled on the pdf grid

  GroupStats(const GroupView& view, const MetricConfig& cfg,
             const Eigen::VectorXd& pdf_x)
      : id(view.group_id),
        count(static_cast<double>(view.count())),
        mean(view.predictions.mean()),
        cdf(fit_ecdf(view)) {
    rate = positive_rate(cdf.sorted_values(), cfg.threshold);
    pdf = fit_kde(view, cfg.kde).evaluate(pdf_x);
  }
};

double mutual_information_from_curves(const Eigen::VectorXd& pdf0, double n0,
                                      const Eigen::VectorXd& pdf1, double n1,
                                      const Eigen::VectorXd& x) {
  const double p0 = n0 / (n0 + n1);
  const double p1 = n1 / (n0 + n1);
  const Eigen::VectorXd pooled = p0 * pdf0 + p1 * pdf1;
  const double mi = differential_entropy(pooled, x) -
                    p0 * differential_entropy(pdf0, x) -
                    p1 * differential_entropy(pdf1, x);
  return std::max(0.0, mi);
}

PairMetrics metrics_from_stats(const GroupStats& a, const GroupStats& b,
                               const Eigen::VectorXd& pdf_x,
                               const Eigen::VectorXd& cdf_x) {
  PairMetrics m;
  m.pair = {a.id, b.id};
  m.delta_dp_b = std::abs(a.rate - b.rate);
  m.delta_dp_c = std::abs(a.mean - b.mean);
  m.abpc = trapezoid((a.pdf - b.pdf).cwiseAbs(), pdf_x);
  m.abcc = trapezoid((a.cdf.evaluate(cdf_x) - b.cdf.evaluate(cdf_x)).cwiseAbs(),
                     cdf_x);
  m.mutual_information =
      mutual_information_from_curves(a.pdf, a.count, b.pdf, b.count, pdf_x);
  return m;
}

void fill_accuracy(const PredictionSet& ps, MetricReport& report) {
  if (!ps.has_labels()) return;
  report.acc = accuracy(ps, report.config.threshold);
  if (ps.labels()->sum() > 0) report.ap = average_precision(ps);
}

}  // namespace

void MetricConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0,1], got " +
                      format_double(threshold));
  }
  if (pdf_grid < 2) throw ConfigError("pdf_grid must be at least 2");
  if (cdf_grid < 2) throw ConfigError("cdf_grid must be at least 2");
  if (kde.rule == BandwidthRule::kFixed && !(kde.fixed_bandwidth > 0.0)) {
    throw ConfigError("fixed bandwidth must be positive");
  }
}

double delta_dp_b(const PredictionSet& ps, GroupPair pair, double threshold) {
  check_pair(ps, pair);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0,1]");
  }
  const Eigen::VectorXd a = sorted_predictions(group_view(ps, pair.first));
  const Eigen::VectorXd b = sorted_predictions(group_view(ps, pair.second));
  return std::abs(positive_rate(a, threshold) - positive_rate(b, threshold));
}

double delta_dp_c(const PredictionSet& ps, GroupPair pair) {
  check_pair(ps, pair);
  return std::abs(group_view(ps, pair.first).predictions.mean() -
                  group_view(ps, pair.second).predictions.mean());
}

double abpc(const DensityEstimate& f0, const DensityEstimate& f1,
            Eigen::Index grid_points) {
  if (grid_points < 2) throw ConfigError("pdf grid must be at least 2");
  const Eigen::VectorXd x = linspace(grid_points);
  return trapezoid((f0.evaluate(x) - f1.evaluate(x)).cwiseAbs(), x);
}

double abcc(const EmpiricalCdf& f0, const EmpiricalCdf& f1,
            Eigen::Index grid_points) {
  if (grid_points < 2) throw ConfigError("cdf grid must be at least 2");
  const Eigen::VectorXd x = linspace(grid_points);
  return trapezoid((f0.evaluate(x) - f1.evaluate(x)).cwiseAbs(), x);
}

double abpc(const PredictionSet& ps, GroupPair pair, const MetricConfig& cfg) {
  check_pair(ps, pair);
  cfg.validate();
  return abpc(fit_kde(group_view(ps, pair.first), cfg.kde),
              fit_kde(group_view(ps, pair.second), cfg.kde), cfg.pdf_grid);
}

double abcc(const PredictionSet& ps, GroupPair pair, const MetricConfig& cfg) {
  check_pair(ps, pair);
  cfg.validate();
  return abcc(fit_ecdf(group_view(ps, pair.first)),
              fit_ecdf(group_view(ps, pair.second)), cfg.cdf_grid);
}

ThresholdSweep threshold_sweep(const PredictionSet& ps, GroupPair pair,
                               Eigen::Index steps) {
  if (steps < 2) {
    throw ConfigError("sweep needs at least 2 steps, got " +
                      std::to_string(steps));
  }
  check_pair(ps, pair);
  const Eigen::VectorXd a = sorted_predictions(group_view(ps, pair.first));
  const Eigen::VectorXd b = sorted_predictions(group_view(ps, pair.second));
  auto gap = [&](double t) {
    return std::abs(positive_rate(a, t) - positive_rate(b, t));
  };

  ThresholdSweep sweep;
  sweep.t = linspace(steps);
  sweep.delta_dp_b.resize(steps);
  for (Eigen::Index k = 0; k < steps; ++k) sweep.delta_dp_b[k] = gap(sweep.t[k]);
  sweep.integral = trapezoid(sweep.delta_dp_b, sweep.t);

  // The gap only changes at sample values, so it is constant on each open
  // interval between consecutive breakpoints.
  std::vector<double> breaks{0.0, 1.0};
  breaks.insert(breaks.end(), a.begin(), a.end());
  breaks.insert(breaks.end(), b.begin(), b.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double exact = 0.0;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double lo = breaks[j];
    const double hi = breaks[j + 1];
    exact += (hi - lo) * gap(0.5 * (lo + hi));
  }
  sweep.exact_integral = exact;
  return sweep;
}

void write_sweep_csv(std::ostream& out, const ThresholdSweep& sweep) {
  out << "t,delta_dp_b\n";
  for (Eigen::Index k = 0; k < sweep.t.size(); ++k) {
    out << format_double(sweep.t[k]) << ','
        << format_double(sweep.delta_dp_b[k]) << '\n';
  }
}

double differential_entropy(const Eigen::VectorXd& density,
                            const Eigen::VectorXd& x) {
  Eigen::VectorXd integrand(density.size());
  for (Eigen::Index k = 0; k < density.size(); ++k) {
    const double f = density[k];
    integrand[k] = f < kEntropyFloor ? 0.0 : -f * std::log(f);
  }
  return trapezoid(integrand, x);
}

double mutual_information(const PredictionSet& ps, GroupPair pair,
                          const MetricConfig& cfg) {
  check_pair(ps, pair);
  cfg.validate();
  const Eigen::VectorXd x = linspace(cfg.pdf_grid);
  const GroupView v0 = group_view(ps, pair.first);
  const GroupView v1 = group_view(ps, pair.second);
  return mutual_information_from_curves(
      fit_kde(v0, cfg.kde).evaluate(x), static_cast<double>(v0.count()),
      fit_kde(v1, cfg.kde).evaluate(x), static_cast<double>(v1.count()), x);
}

namespace {

const Eigen::VectorXi& require_labels(const PredictionSet& ps) {
  if (!ps.has_labels()) {
    throw MissingLabelError("accuracy metrics need a y_true column");
  }
  return *ps.labels();
}

}  // namespace

double accuracy(const PredictionSet& ps, double threshold) {
  const Eigen::VectorXi& labels = require_labels(ps);
  const Eigen::VectorXi decisions =
      (ps.predictions().array() >= threshold).cast<int>();
  return static_cast<double>((decisions.array() == labels.array()).count()) /
         static_cast<double>(ps.size());
}

double average_precision(const PredictionSet& ps) {
  const Eigen::VectorXi& labels = require_labels(ps);
  const Eigen::VectorXd& pred = ps.predictions();
  const Eigen::Index positives = labels.sum();
  if (positives == 0) {
    throw MissingPositiveError(
        "average precision is undefined without positive labels");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ps.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<Eigen::Index>(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return pred[l] > pred[r]; });
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  double ap = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = pred[order[i]];
    // Every sample tied at this value crosses the threshold together.
    while (i < order.size() && pred[order[i]] == value) {
      if (labels[order[i]] == 1) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
      ++i;
    }
    const double recall = tp / static_cast<double>(positives);
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

AccuracyMetrics accuracy_metrics(const PredictionSet& ps, double threshold) {
  return {accuracy(ps, threshold), average_precision(ps)};
}

PairMetrics pair_metrics(const PredictionSet& ps, GroupPair pair,
                         const MetricConfig& cfg) {
  check_pair(ps, pair);
  cfg.validate();
  const Eigen::VectorXd pdf_x = linspace(cfg.pdf_grid);
  const Eigen::VectorXd cdf_x = linspace(cfg.cdf_grid);
  const GroupStats a(group_view(ps, pair.first), cfg, pdf_x);
  const GroupStats b(group_view(ps, pair.second), cfg, pdf_x);
  return metrics_from_stats(a, b, pdf_x, cdf_x);
}

MetricReport pair_report(const PredictionSet& ps, GroupPair pair,
                         const MetricConfig& cfg) {
  const PairMetrics m = pair_metrics(ps, pair, cfg);
  MetricReport report;
  report.config = cfg;
  report.group_pair = pair;
  report.delta_dp_b = m.delta_dp_b;
  report.delta_dp_c = m.delta_dp_c;
  report.abpc = m.abpc;
  report.abcc = m.abcc;
  report.mutual_information = m.mutual_information;
  report.pairs.push_back(m);
  fill_accuracy(ps, report);
  return report;
}

MetricReport multi_group_report(const PredictionSet& ps,
                                const MetricConfig& cfg) {
  cfg.validate();
  const auto views = split_groups(ps);
  if (views.size() == 2) {
    return pair_report(ps, {views[0].group_id, views[1].group_id}, cfg);
  }
  const Eigen::VectorXd pdf_x = linspace(cfg.pdf_grid);
  const Eigen::VectorXd cdf_x = linspace(cfg.cdf_grid);
  std::vector<GroupStats> stats;
  stats.reserve(views.size());
  for (const auto& v : views) stats.emplace_back(v, cfg, pdf_x);

  MetricReport report;
  report.config = cfg;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    for (std::size_t j = i + 1; j < stats.size(); ++j) {
      report.pairs.push_back(
          metrics_from_stats(stats[i], stats[j], pdf_x, cdf_x));
    }
  }
  const double count = static_cast<double>(report.pairs.size());
  for (const auto& m : report.pairs) {
    report.delta_dp_b += m.delta_dp_b / count;
    report.delta_dp_c += m.delta_dp_c / count;
    report.abpc += m.abpc / count;
    report.abcc += m.abcc / count;
    report.mutual_information += m.mutual_information / count;
  }
  fill_accuracy(ps, report);
  return report;
}

std::string to_json(const MetricReport& report) {
  using json = nlohmann::ordered_json;
  auto optional_value = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  json doc;
  doc["delta_dp_b"] = report.delta_dp_b;
  doc["delta_dp_c"] = report.delta_dp_c;
  doc["abpc"] = report.abpc;
  doc["abcc"] = report.abcc;
  doc["mi_nats"] = report.mutual_information;
  doc["acc"] = optional_value(report.acc);
  doc["ap"] = optional_value(report.ap);
  doc["group_pair"] =
      report.group_pair
          ? json::array({report.group_pair->first, report.group_pair->second})
          : json("averaged");
  doc["config"] = {{"threshold", report.config.threshold},
                   {"pdf_grid", report.config.pdf_grid},
                   {"cdf_grid", report.config.cdf_grid},
                   {"bandwidth", report.config.kde.to_string()}};
  json pairs = json::array();
  for (const auto& m : report.pairs) {
    pairs.push_back({{"g0", m.pair.first},
                     {"g1", m.pair.second},
                     {"delta_dp_b", m.delta_dp_b},
                     {"delta_dp_c", m.delta_dp_c},
                     {"abpc", m.abpc},
                     {"abcc", m.abcc},
                     {"mi_nats", m.mutual_information}});
  }
  doc["pairs"] = std::move(pairs);
  return doc.dump(2) + "\n";
}

std::string to_table(const MetricReport& report) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const std::string& value) {
    out << name << std::string(name.size() < 12 ? 12 - name.size() : 1, ' ')
        << value << '\n';
  };
  row("pair", report.group_pair
                  ? std::to_string(report.group_pair->first) + " vs " +
                        std::to_string(report.group_pair->second)
                  : "averaged over " + std::to_string(report.pairs.size()) +
                        " pairs");
  row("delta_dp_b", format_double(report.delta_dp_b));
  row("delta_dp_c", format_double(report.delta_dp_c));
  row("abpc", format_double(report.abpc));
  row("abcc", format_double(report.abcc));
  row("mi_nats", format_double(report.mutual_information));
  row("acc", report.acc ? format_double(*report.acc) : "n/a");
  row("ap", report.ap ? format_double(*report.ap) : "n/a");
  if (report.pairs.size() > 1) {
    out << "\ng0,g1,delta_dp_b,delta_dp_c,abpc,abcc,mi_nats\n";
    for (const auto& m : report.pairs) {
      out << m.pair.first << ',' << m.pair.second << ','
          << format_double(m.delta_dp_b) << ',' << format_double(m.delta_dp_c)
          << ',' << format_double(m.abpc) << ',' << format_double(m.abcc)
          << ',' << format_double(m.mutual_information) << '\n';
    }
  }
  return out.str();
}

}  // namespace parity
