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
// Grid, quadrature and kernel helpers. Free functions templated on the Eigen
// expression type so they accept vectors, maps, blocks and expressions alike.

#ifndef PARITY_METER_NUMERIC_HPP_
#define PARITY_METER_NUMERIC_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

namespace parity {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Uniform grid over [lo, hi] with `count` points. Point k is lo + k*step and
// the last point is pinned to hi, the same construction numpy.linspace uses.
template <typename Scalar = double>
Vector<Scalar> linspace(Eigen::Index count, Scalar lo = 0, Scalar hi = 1) {
  Vector<Scalar> x(count);
  if (count == 1) {
    x[0] = lo;
    return x;
  }
  const Scalar step = (hi - lo) / static_cast<Scalar>(count - 1);
  for (Eigen::Index k = 0; k < count; ++k) {
    x[k] = static_cast<Scalar>(k) * step + lo;
  }
  x[count - 1] = hi;
  return x;
}

// Composite trapezoid rule on an arbitrary ascending grid:
//   sum_k (x[k+1]-x[k]) * (y[k+1]+y[k]) / 2
template <typename DerivedY, typename DerivedX>
typename DerivedY::Scalar trapezoid(const Eigen::MatrixBase<DerivedY>& y,
                                    const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedY::Scalar;
  const Eigen::Index n = y.size();
  Scalar total(0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    total += (x[k + 1] - x[k]) * (y[k + 1] + y[k]) / Scalar(2);
  }
  return total;
}

// Trapezoid weights for a uniform grid over [0,1] with `count` points, so that
// weights.dot(y) is the trapezoid integral.
template <typename Scalar = double>
Vector<Scalar> trapezoid_weights(Eigen::Index count) {
  const Vector<Scalar> x = linspace<Scalar>(count);
  Vector<Scalar> w = Vector<Scalar>::Zero(count);
  for (Eigen::Index k = 0; k + 1 < count; ++k) {
    const Scalar half = (x[k + 1] - x[k]) / Scalar(2);
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

template <typename Scalar>
Scalar standard_normal_pdf(Scalar z) {
  return std::exp(Scalar(-0.5) * z * z) /
         std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar standard_normal_cdf(Scalar z) {
  return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// Sample mean and (n-1)-divisor standard deviation.
template <typename Derived>
typename Derived::Scalar sample_std(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  if (n < 2) return Scalar(0);
  const Scalar mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / Scalar(n - 1));
}

// Number of worker threads: PARITY_METER_THREADS when set and positive,
// otherwise the hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n) across worker threads. Each index is visited
// exactly once; callers write to disjoint slots so results do not depend on
// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace parity

#endif  // PARITY_METER_NUMERIC_HPP_
