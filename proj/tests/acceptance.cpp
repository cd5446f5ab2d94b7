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
// Acceptance suite. One line per criterion:
//   A<k> PASS|FAIL <seconds>s <measured values>
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "optim_oracle.hpp"
#include "parity_meter/core.hpp"
#include "parity_meter/density.hpp"
#include "parity_meter/errors.hpp"
#include "parity_meter/metrics.hpp"
#include "parity_meter/optim.hpp"
#include "parity_meter/random.hpp"
#include "parity_meter/synth.hpp"
#include "parity_meter/transport.hpp"

using namespace parity;
using testing::data_path;
using testing::dir_contents;
using testing::run_cli;
using testing::ScratchDir;

namespace {

constexpr GroupPair kPair{0, 1};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a named check; the value is printed whether or not it holds.
  void expect(bool ok, const std::string& what, double value) {
    pass = pass && ok;
    detail << ' ' << what << '=' << value << (ok ? "" : "(!)");
  }
  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) detail << ' ' << what << "(!)";
  }
};

struct Criterion {
  std::string id;
  double time_limit_s;  // <= 0 for none
  std::function<void(Outcome&)> run;
};

PredictionSet two_groups(const std::vector<double>& v0, const std::vector<double>& v1) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(v0.size() + v1.size()));
  std::vector<GroupId> s;
  Eigen::Index k = 0;
  for (double v : v0) {
    y[k++] = v;
    s.push_back(0);
  }
  for (double v : v1) {
    y[k++] = v;
    s.push_back(1);
  }
  return PredictionSet(std::move(y), std::move(s));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One group of scores from one of three families, always inside [0, 1].
std::vector<double> random_scores(Random& rng, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double family = rng.uniform();
  if (family < 0.4) {
    const double mu = -2.0 + 4.0 * rng.uniform();
    const double sd = 0.2 + 1.8 * rng.uniform();
    for (auto& v : out) v = sigmoid(rng.normal(mu, sd));
  } else if (family < 0.7) {
    const double a = 0.8 * rng.uniform();
    const double b = a + (1.0 - a) * (0.05 + 0.95 * rng.uniform());
    for (auto& v : out) v = a + (b - a) * rng.uniform();
  } else {
    const double c0 = rng.uniform(), c1 = rng.uniform();
    const double w = rng.uniform();
    for (auto& v : out) {
      const double c = rng.uniform() < w ? c0 : c1;
      v = std::clamp(rng.normal(c, 0.05), 0.0, 1.0);
    }
  }
  return out;
}

// W1 between two samples as the integral of |F0 - F1| over merged breakpoints.
double w1_oracle(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> xs = a;
  xs.insert(xs.end(), b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double x = xs[k];
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) /
                      static_cast<double>(a.size());
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) /
                      static_cast<double>(b.size());
    total += std::abs(fa - fb) * (xs[k + 1] - x);
  }
  return total;
}

void a1(Outcome& o) {
  const PredictionSet ps = read_predictions_csv_file(data_path("argument1.csv"));
  o.expect(delta_dp_c(ps, kPair) <= 1e-12, "delta_dp_c", delta_dp_c(ps, kPair));
  MetricConfig cfg;
  const double c = abcc(ps, kPair, cfg);
  o.expect(std::abs(c - 0.16) <= 2e-3, "abcc", c);
  // Group 1 is a point mass, so the default bandwidth rule has nothing to scale.
  bool degenerate = false;
  try {
    abpc(ps, kPair, cfg);
  } catch (const NumericError&) {
    degenerate = true;
  }
  o.expect(degenerate, "scott_rejects_point_mass");
  cfg.kde = KdeConfig::fixed(0.05);
  const double p = abpc(ps, kPair, cfg);
  o.expect(p > 0.1, "abpc_h0.05", p);
}

void a2(Outcome& o) {
  const PredictionSet ps = read_predictions_csv_file(data_path("argument2.csv"));
  const double b5 = delta_dp_b(ps, kPair, 0.5);
  const double b6 = delta_dp_b(ps, kPair, 0.6);
  o.expect(b5 == 0.0, "delta_dp_b@0.5", b5);
  o.expect(std::abs(b6 - 0.5) <= 1e-12, "delta_dp_b@0.6", b6);
  const double c = abcc(ps, kPair, MetricConfig{});
  o.expect(std::abs(c - 0.10) <= 2e-3, "abcc", c);
}

void a3(Outcome& o) {
  SynthSpec spec;
  spec.n_per_group = 100'000;
  spec.seed = 0;
  const MetricConfig cfg;
  const double p = abpc(generate(spec), kPair, cfg);
  o.expect(std::abs(p - 0.7658) <= 0.03, "abpc", p);
  spec.map_through_sigmoid = false;
  const double c = abcc(generate(spec), kPair, cfg);
  o.expect(std::abs(c - 0.100) <= 0.005, "abcc_no_sigmoid", c);
}

void a4(Outcome& o) {
  Random rng(2024);
  const MetricConfig cfg;
  double worst_identity = 0.0, worst_lower = 1.0, worst_abpc = 1.0;
  bool ranges = true;
  for (int d = 0; d < 100; ++d) {
    const int n0 = 200 + static_cast<int>(rng.uniform() * 1601.0);
    const PredictionSet ps = two_groups(random_scores(rng, n0), random_scores(rng, 2000 - n0));
    const PairMetrics m = pair_metrics(ps, kPair, cfg);
    const double integral = threshold_sweep(ps, kPair, 10001).integral;
    worst_identity = std::max(worst_identity, std::abs(m.abcc - integral));
    worst_lower = std::min(worst_lower, integral - m.delta_dp_c);
    worst_abpc = std::min(worst_abpc, m.abpc - m.delta_dp_c);
    const double p = n0 / 2000.0;
    const double h_s = -p * std::log(p) - (1 - p) * std::log(1 - p);
    ranges = ranges && m.delta_dp_b >= 0 && m.delta_dp_b <= 1 && m.delta_dp_c >= 0 &&
             m.delta_dp_c <= 1 && m.abcc >= 0 && m.abcc <= 1 && m.abpc >= 0 && m.abpc <= 2 &&
             m.mutual_information >= 0 && m.mutual_information <= h_s;
  }
  o.expect(worst_identity <= 2e-3, "max|abcc-sweep|", worst_identity);
  o.expect(worst_lower >= -1e-3, "min(sweep-dpc)", worst_lower);
  o.expect(worst_abpc >= -0.02, "min(abpc-dpc)", worst_abpc);
  o.expect(ranges, "ranges");
}

void a5(Outcome& o) {
  SynthSpec spec;
  spec.n_per_group = 10'000;
  spec.seed = 5;
  const PredictionSet ps = generate(spec);
  const PredictionSet squared(ps.predictions().array().square(), ps.groups());
  const MetricConfig cfg;
  const double diff = std::abs(abpc(ps, kPair, cfg) - abpc(squared, kPair, cfg));
  o.expect(diff <= 0.05, "|abpc-abpc(x^2)|", diff);

  Random rng(55);
  std::vector<double> shared = random_scores(rng, 1000);
  double worst = 0.0;
  for (const PredictionSet& same :
       {two_groups(shared, shared), read_predictions_csv_file(data_path("identical.csv"))}) {
    const PairMetrics m = pair_metrics(same, kPair, cfg);
    worst = std::max({worst, m.delta_dp_b, m.delta_dp_c, m.abpc, m.abcc});
  }
  o.expect(worst <= 1e-9, "identical_max", worst);
}

void a6(Outcome& o) {
  Random rng(606);
  double worst_cost = 0.0, worst_total = 0.0;
  bool bitwise = true;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform() * 500.0);
    const auto v0 = random_scores(rng, n);
    const auto v1 = random_scores(rng, n);
    const PredictionSet ps = two_groups(v0, v1);
    const GroupView g0 = group_view(ps, 0), g1 = group_view(ps, 1);
    const TransportPlan plan = sorted_match_plan(g0, g1);
    const double w1 = w1_oracle(v0, v1);
    const double library_w1 = wasserstein1(fit_ecdf(g0), fit_ecdf(g1));
    worst_cost = std::max({worst_cost, std::abs(plan.cost() - w1), std::abs(library_w1 - w1)});
    const BiasDensity rho = bias_density(plan);
    bitwise = bitwise && rho.total == plan.cost();
    worst_total = std::max(worst_total, std::abs(rho.total - w1));
  }
  o.expect(worst_cost <= 1e-9, "max|cost-w1|", worst_cost);
  o.expect(bitwise, "total==cost");
  o.expect(worst_total <= 1e-9, "max|total-w1|", worst_total);

  const auto shared = random_scores(rng, 300);
  const PredictionSet same = two_groups(shared, shared);
  for (const PlanConstruction c : {PlanConstruction::kSortedMatch, PlanConstruction::kQuantileGrid}) {
    const TransportPlan plan =
        optimal_plan(group_view(same, 0), group_view(same, 1), c, 1000);
    bool diagonal = true;
    for (const Coupling& k : plan.couplings) diagonal = diagonal && k.source == k.target;
    o.expect(diagonal, "diagonal");
    o.expect(bias_density(plan).total <= 1e-9, "identical_total", bias_density(plan).total);
  }
}

void a7(Outcome& o) {
  SynthSpec spec;
  spec.seed = 0;
  ConvergenceOptions opt;
  const ConvergenceReport r = convergence_experiment(spec, opt);
  const auto& ns = opt.n_values;
  for (const EstimatedMetric m : {EstimatedMetric::kAbpc, EstimatedMetric::kAbcc}) {
    bool decreasing = true;
    for (std::size_t i = 1; i < ns.size(); ++i) {
      decreasing = decreasing && r.median(ns[i], m) < r.median(ns[i - 1], m);
    }
    o.expect(decreasing, std::string(to_string(m)) + "_decreasing");
  }
  const double slope = r.slope(EstimatedMetric::kAbcc);
  o.expect(slope >= -0.8 && slope <= -0.25, "abcc_slope", slope);
  for (const Eigen::Index n : ns) {
    const double mi = r.median(n, EstimatedMetric::kMi);
    const double ab = r.median(n, EstimatedMetric::kAbcc);
    o.expect(mi > ab, "mi/abcc@" + std::to_string(n), mi / ab);
  }
}

void a8(Outcome& o) {
  const std::pair<const char*, Penalty> cases[] = {
      {"ce", Penalty::none()},
      {"dpc", Penalty::delta_dp_c(2.0)},
      {"abpc", Penalty::abpc_kde(2.0)},
  };
  std::uint64_t seed = 801;
  for (const auto& [name, pen] : cases) {
    const auto r = testing::gradient_check(pen, seed++);
    o.expect(r.gradient < 1e-4, std::string(name) + "_grad_rel", r.gradient);
    o.expect(r.loss < 1e-11, std::string(name) + "_loss_rel", r.loss);
  }
}

void a9(Outcome& o) {
  std::ifstream in(data_path("biased_train.csv"));
  const Batch b = read_training_csv(in);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 500;
  cfg.halve_on_increase = false;
  cfg.report_every = cfg.epochs;
  cfg.penalty = Penalty::delta_dp_c(5.0);
  const MetricReport dpc = train(b, cfg).trajectory.back().report;
  cfg.penalty = Penalty::abpc_kde(5.0);
  const MetricReport kde = train(b, cfg).trajectory.back().report;
  o.expect(dpc.delta_dp_c < 0.02, "dpc_run.delta_dp_c", dpc.delta_dp_c);
  o.expect(dpc.abcc > 3 * dpc.delta_dp_c, "dpc_run.abcc", dpc.abcc);
  o.expect(kde.abpc < dpc.abpc, "abpc_run.abpc", kde.abpc);
  o.detail << " dpc_run.abpc=" << dpc.abpc;
}

void a10(Outcome& o) {
  ScratchDir dir("acceptance");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"report", "report --all-pairs --input " + data_path("three_groups.csv") + " --output "},
      {"sweep", "sweep --input " + data_path("argument2.csv") + " --output "},
      {"density", "density --input " + data_path("three_groups.csv") + " --out-dir "},
      {"bias-density",
       "bias-density --svg --pair 0 2 --input " + data_path("three_groups.csv") + " --out-dir "},
      {"synth", "synth --n-per-group 500 --seed 3 --out-dir "},
      {"convergence", "convergence --n-values 50,200 --trials 3 --out-dir "},
      {"train-toy", "train-toy --penalty abpc --epochs 25 --report-every 5 --input " +
                        data_path("biased_train.csv") + " --out-dir "},
      {"synth-train", "synth-train --n-per-group 100 --seed 2 --out-dir "},
  };
  for (const auto& [name, args] : commands) {
    const bool single = name == "report" || name == "sweep";
    const std::string leaf = single ? "/out" : "";
    std::string manifest;
    std::vector<std::map<std::string, std::string>> runs;
    bool ok = true;
    for (const char* run : {"a", "b"}) {
      const std::filesystem::path sub = dir.path() / (name + "_" + run);
      ok = ok && run_cli(args + sub.string() + leaf).exit_code == 0;
      runs.push_back(dir_contents(sub));
      if (manifest.empty()) {
        manifest = (sub / (single ? "out.manifest.json" : "manifest.json")).string();
      }
    }
    for (const char* run : {"c", "d"}) {
      const std::filesystem::path sub = dir.path() / (name + "_" + run);
      ok = ok && run_cli("replay " + manifest + " --check --out-dir " + sub.string()).exit_code == 0;
      runs.push_back(dir_contents(sub));
    }
    for (const auto& r : runs) ok = ok && r == runs.front() && r.size() >= 2;
    o.expect(ok, name);
  }
  o.detail << " commands=" << commands.size();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"A1", 1.0, a1},  {"A2", 1.0, a2},    {"A3", 30.0, a3}, {"A4", 60.0, a4},
      {"A5", 0.0, a5},  {"A6", 0.0, a6},    {"A7", 300.0, a7}, {"A8", 0.0, a8},
      {"A9", 120.0, a9}, {"A10", 0.0, a10},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0) o.expect(secs < c.time_limit_s, "time_limit_s", c.time_limit_s);
    failures += o.pass ? 0 : 1;
    std::printf("%s %s %.2fs%s\n", c.id.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
