// Copyright 2026 The meshgnn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef MESHGNN_METRICS_HPP
#define MESHGNN_METRICS_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meshgnn/core.hpp"

namespace meshgnn {

template <typename Scalar>
using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct MetricSet {
  Scalar mse = 0;
  Scalar rmse = 0;
  Scalar mape = 0;  // percent
  Scalar r2 = 0;
  Column<Scalar> abs_errors;
};

using Metrics = MetricSet<Real>;

namespace detail {
template <typename A, typename B>
void check_pair(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& y_hat) {
  if (y.size() != y_hat.size()) throw ValidationError("metric inputs differ in length");
  if (y.size() == 0) throw ValidationError("metric inputs are empty");
}
}  // namespace detail

template <typename A, typename B>
typename A::Scalar mse_loss(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& y_hat) {
  detail::check_pair(y, y_hat);
  return (y - y_hat).squaredNorm() / static_cast<typename A::Scalar>(y.size());
}

template <typename A, typename B>
Column<typename A::Scalar> absolute_errors(const Eigen::MatrixBase<A>& y,
                                           const Eigen::MatrixBase<B>& y_hat) {
  detail::check_pair(y, y_hat);
  return (y - y_hat).cwiseAbs();
}

template <typename A, typename B>
typename A::Scalar rmse(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& y_hat) {
  using std::sqrt;
  return sqrt(mse_loss(y, y_hat));
}

/// Mean absolute percentage error in percent. Any zero target is an error.
template <typename A, typename B>
typename A::Scalar mape(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& y_hat) {
  using S = typename A::Scalar;
  detail::check_pair(y, y_hat);
  S acc = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == S(0)) {
      throw ValidationError("MAPE undefined: sample " + std::to_string(i) + " has target 0");
    }
    using std::abs;
    acc += abs((y(i) - y_hat(i)) / y(i));
  }
  return S(100) * acc / static_cast<S>(y.size());
}

/// Coefficient of determination. Constant targets are an error.
template <typename A, typename B>
typename A::Scalar r_squared(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& y_hat) {
  using S = typename A::Scalar;
  detail::check_pair(y, y_hat);
  const S mean = y.mean();
  const S ss_tot = (y.array() - mean).square().sum();
  if (ss_tot == S(0)) throw ValidationError("R^2 undefined: targets are constant");
  return S(1) - (y - y_hat).squaredNorm() / ss_tot;
}

template <typename A, typename B>
MetricSet<typename A::Scalar> compute_metrics(const Eigen::MatrixBase<A>& y,
                                              const Eigen::MatrixBase<B>& y_hat) {
  MetricSet<typename A::Scalar> m;
  m.mse = mse_loss(y, y_hat);
  using std::sqrt;
  m.rmse = sqrt(m.mse);
  m.mape = mape(y, y_hat);
  m.r2 = r_squared(y, y_hat);
  m.abs_errors = absolute_errors(y, y_hat);
  return m;
}

inline Metrics compute_metrics(const std::vector<Real>& y, const std::vector<Real>& y_hat) {
  using Map = Eigen::Map<const VectorX>;
  return compute_metrics(Map(y.data(), static_cast<Eigen::Index>(y.size())),
                         Map(y_hat.data(), static_cast<Eigen::Index>(y_hat.size())));
}

}  // namespace meshgnn

#endif  // MESHGNN_METRICS_HPP
