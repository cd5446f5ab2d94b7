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

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "optim_oracle.hpp"
#include "parity_meter/errors.hpp"
#include "parity_meter/optim.hpp"
#include "parity_meter/random.hpp"

using namespace parity;

using testing::gradient_check;
using testing::pack;
using testing::random_batch;
using testing::random_model;
using testing::worst_relative_error;

namespace {

Penalty penalty_only(const Penalty& pen) {
  Penalty none = pen;
  none.lambda = 0.0;
  return none;
}

Eigen::VectorXd penalty_gradient(const ToyModel& m, const Batch& b, const Penalty& pen) {
  return pack(loss_and_grad(m, b, pen)) - pack(loss_and_grad(m, b, penalty_only(pen)));
}

}  // namespace

TEST_CASE("lambda zero gives the plain logistic-regression gradient") {
  Random rng(3);
  const Batch b = random_batch(rng, 50, 4);
  const ToyModel m = random_model(rng, 4);
  const Eigen::VectorXd p =
      ((b.features * m.weights).array() + m.bias).unaryExpr([](double z) {
        return 1.0 / (1.0 + std::exp(-z));
      });
  const Eigen::VectorXd r = (p - b.labels.cast<double>()) / 50.0;
  const LossGrad plain = loss_and_grad(m, b, Penalty::none());
  CHECK(worst_relative_error(plain.grad_weights, b.features.transpose() * r) < 1e-12);
  CHECK(plain.grad_bias == doctest::Approx(r.sum()).epsilon(1e-12));
  CHECK(plain.penalty == 0.0);
  for (const Penalty& pen : {Penalty::delta_dp_c(0.0), Penalty::abpc_kde(0.0)}) {
    const LossGrad g = loss_and_grad(m, b, pen);
    CHECK(pack(g) == pack(plain));
    CHECK(g.loss == plain.loss);
    CHECK(g.penalty > 0.0);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  for (const auto& [pen, seed] : {std::pair{Penalty::none(), 101},
                                  std::pair{Penalty::delta_dp_c(2.0), 102},
                                  std::pair{Penalty::abpc_kde(2.0), 103},
                                  std::pair{Penalty::abpc_kde(0.7, 0.1, 57), 104}}) {
    const auto r = gradient_check(pen, static_cast<std::uint64_t>(seed));
    CHECK(r.gradient < 1e-4);
    CHECK(r.loss < 1e-11);
  }
}

TEST_CASE("mean-gap penalty gradient under group exchange") {
  Random rng(8);
  Batch b = random_batch(rng, 30, 2);
  const ToyModel m = random_model(rng, 2);
  const Penalty pen = Penalty::delta_dp_c(1.0);

  SUBCASE("swapping group ids leaves the penalty and its gradient unchanged") {
    Batch swapped = b;
    for (auto& g : swapped.groups) g = 1 - g;
    CHECK(loss_and_grad(m, swapped, pen).penalty == doctest::Approx(loss_and_grad(m, b, pen).penalty).epsilon(1e-14));
    CHECK(worst_relative_error(penalty_gradient(m, swapped, pen), penalty_gradient(m, b, pen)) < 1e-12);
  }
  SUBCASE("mirror-image groups make the gradient odd in the weights") {
    Batch mirror;
    mirror.features.resize(2 * b.size(), 2);
    mirror.labels.resize(2 * b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      mirror.features.row(i) = b.features.row(i);
      mirror.features.row(b.size() + i) = -b.features.row(i);
      mirror.labels[i] = b.labels[i];
      mirror.labels[b.size() + i] = 1 - b.labels[i];
      mirror.groups.push_back(0);
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) mirror.groups.push_back(1);
    ToyModel pos = m;
    pos.bias = 0.0;
    ToyModel neg = pos;
    neg.weights = -pos.weights;
    const Eigen::VectorXd gp = penalty_gradient(pos, mirror, pen);
    const Eigen::VectorXd gn = penalty_gradient(neg, mirror, pen);
    CHECK(loss_and_grad(pos, mirror, pen).penalty ==
          doctest::Approx(loss_and_grad(neg, mirror, pen).penalty).epsilon(1e-12));
    CHECK(worst_relative_error(gp.head(2), -gn.head(2)) < 1e-10);
  }
}

TEST_CASE("penalties need both groups") {
  Random rng(4);
  Batch b = random_batch(rng, 10, 2);
  for (auto& g : b.groups) g = 0;
  const ToyModel m = random_model(rng, 2);
  CHECK_NOTHROW(loss_and_grad(m, b, Penalty::none()));
  CHECK_THROWS_AS(loss_and_grad(m, b, Penalty::delta_dp_c(1.0)), GroupError);
  CHECK_THROWS_AS(loss_and_grad(m, b, Penalty::abpc_kde(1.0)), GroupError);
  Penalty other = Penalty::delta_dp_c(1.0);
  other.groups = {0, 7};
  CHECK_THROWS_AS(loss_and_grad(m, b, other), GroupError);
}

TEST_CASE("penalty and batch validation") {
  Random rng(5);
  const Batch b = random_batch(rng, 10, 2);
  const ToyModel m = random_model(rng, 2);
  CHECK_THROWS_AS(loss_and_grad(m, b, Penalty::delta_dp_c(-1.0)), ConfigError);
  CHECK_THROWS_AS(loss_and_grad(m, b, Penalty::abpc_kde(1.0, 0.0)), ConfigError);
  CHECK_THROWS_AS(loss_and_grad(m, b, Penalty::abpc_kde(1.0, 0.05, 1)), ConfigError);
  CHECK_THROWS_AS(loss_and_grad(random_model(rng, 3), b, Penalty::none()), SizeError);
  CHECK_THROWS_AS(loss_and_grad(m, Batch{}, Penalty::none()), SizeError);
}

TEST_CASE("separable data is learned") {
  Random rng(21);
  Batch b;
  const int n = 400;
  b.features.resize(n, 2);
  b.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x0 = rng.normal(0.0, 1.0);
    const double x1 = rng.normal(0.0, 1.0);
    b.features.row(i) << x0, x1;
    b.labels[i] = x0 - 0.5 * x1 > 0.2 ? 1 : 0;
    b.groups.push_back(i % 2);
  }
  TrainConfig cfg;
  cfg.report_every = 100;
  const TrainResult r = train(b, cfg);
  CHECK(*r.trajectory.back().report.acc >= 0.95);
  CHECK(r.trajectory.back().epoch == cfg.epochs);
}

TEST_CASE("training without penalty ignores group labels") {
  Random rng(22);
  const Batch b = random_batch(rng, 120, 3);
  Batch relabeled = b;
  for (auto& g : relabeled.groups) g = g == 0 ? 9 : 4;
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.report_every = 20;
  const TrainResult a = train(b, cfg);
  const TrainResult c = train(relabeled, cfg);
  CHECK(pack(a.model) == pack(c.model));
  REQUIRE(a.trajectory.size() == c.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].loss == c.trajectory[i].loss);
    CHECK(a.trajectory[i].report.abcc == c.trajectory[i].report.abcc);
  }
}

TEST_CASE("loss is non-increasing with step halving") {
  Random rng(23);
  const Batch b = random_batch(rng, 80, 2);
  for (const Penalty& pen : {Penalty::none(), Penalty::delta_dp_c(3.0),
                             Penalty::abpc_kde(3.0, 0.05, 60)}) {
    TrainConfig cfg;
    cfg.penalty = pen;
    cfg.learning_rate = 2.0;
    cfg.epochs = 80;
    const TrainResult r = train(b, cfg);
    REQUIRE(r.trajectory.size() == 81);
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
      CHECK(r.trajectory[i].loss <= r.trajectory[i - 1].loss);
      CHECK(r.trajectory[i].learning_rate <= r.trajectory[i - 1].learning_rate);
    }
  }
}

TEST_CASE("training is deterministic") {
  const Batch b = make_biased_fixture(100, 3);
  TrainConfig cfg;
  cfg.penalty = Penalty::abpc_kde(1.0);
  cfg.epochs = 30;
  cfg.report_every = 10;
  cfg.seed = 17;
  std::ostringstream x, y;
  write_trajectory_csv(x, train(b, cfg).trajectory);
  write_trajectory_csv(y, train(b, cfg).trajectory);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("epoch,loss,acc,delta_dp_c,abpc,abcc\n", 0) == 0);
  int lines = 0;
  for (char ch : x.str()) lines += ch == '\n' ? 1 : 0;
  CHECK(lines == 1 + 4);  // epochs 0, 10, 20, 30
}

TEST_CASE("divergence is reported with its epoch") {
  Random rng(24);
  Batch b = random_batch(rng, 20, 2);
  TrainConfig cfg;
  cfg.halve_on_increase = false;
  cfg.learning_rate = 1e308;
  cfg.epochs = 5;
  b.features *= 1e10;
  try {
    train(b, cfg);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() >= 1);
    CHECK(e.epoch() <= 5);
  }
  b.features(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(train(b, cfg), DivergenceError);
}

TEST_CASE("training config validation") {
  const Batch b = make_biased_fixture(20, 1);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(b, cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.epochs = -1;
  CHECK_THROWS_AS(train(b, cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.report_every = 0;
  CHECK_THROWS_AS(train(b, cfg), ConfigError);
}

TEST_CASE("training CSV round trip and errors") {
  const Batch b = make_biased_fixture(50, 11);
  CHECK(b.features.cols() == 3);
  std::ostringstream out;
  write_training_csv(out, b);
  CHECK(out.str().rfind("x0,x1,x2,y_true,s\n", 0) == 0);
  std::istringstream in(out.str());
  const Batch back = read_training_csv(in);
  CHECK(back.features == b.features);
  CHECK(back.labels == b.labels);
  CHECK(back.groups == b.groups);

  std::istringstream no_features("y_true,s\n1,0\n");
  CHECK_THROWS_AS(read_training_csv(no_features), SchemaError);
  std::istringstream no_labels("x0,s\n1,0\n");
  CHECK_THROWS_AS(read_training_csv(no_labels), SchemaError);
  std::istringstream bad_label("x0,y_true,s\n0.1,1,0\n0.2,2,1\n");
  try {
    read_training_csv(bad_label);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.row() == 1);
  }
  std::istringstream bad_feature("x0,y_true,s\nnan,1,0\n");
  CHECK_THROWS_AS(read_training_csv(bad_feature), RangeError);
}
