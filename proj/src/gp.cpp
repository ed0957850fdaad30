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

#include <cmath>
#include <limits>
#include <numbers>

#include "meshgnn/optimizer.hpp"

namespace meshgnn {

void SearchBounds::validate() const {
  if (k_min > k_max) throw ValidationError("search bounds: empty k range");
  if (l_min > l_max) throw ValidationError("search bounds: empty l range");
}

bool SearchBounds::contains(GridPoint p) const {
  return p.k >= k_min && p.k <= k_max && p.l >= l_min && p.l <= l_max;
}

long SearchBounds::grid_size() const {
  return static_cast<long>(k_max - k_min + 1) * static_cast<long>(l_max - l_min + 1);
}

Real matern52(Real r) {
  const Real s = std::sqrt(5.0) * r;
  return (1 + s + s * s / 3) * std::exp(-s);
}

Eigen::Vector2d GPModel::normalize(GridPoint p) const {
  const Real dk = bounds.k_max - bounds.k_min;
  const Real dl = bounds.l_max - bounds.l_min;
  return {dk > 0 ? (p.k - bounds.k_min) / dk : 0.0, dl > 0 ? (p.l - bounds.l_min) / dl : 0.0};
}

Real GPModel::kernel(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
  const Real u = (a[0] - b[0]) / hyper.lengthscale_k;
  const Real v = (a[1] - b[1]) / hyper.lengthscale_l;
  return hyper.signal_variance * matern52(std::sqrt(u * u + v * v));
}

const std::vector<Real>& gp_lengthscale_grid() {
  static const std::vector<Real> grid = {0.1, 0.2, 0.4, 0.8, 1.6};
  return grid;
}

const std::vector<Real>& gp_signal_variance_grid() {
  static const std::vector<Real> grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  return grid;
}

namespace {

GPModel prepare(const EvalHistory& history, const SearchBounds& bounds, Real noise) {
  bounds.validate();
  if (!(noise >= 0)) throw ValidationError("GP noise variance must be non-negative");
  GPModel gp;
  gp.bounds = bounds;
  gp.noise = noise;
  std::vector<const EvalRecord*> used;
  for (const auto& r : history) {
    if (std::isfinite(r.mse)) used.push_back(&r);
  }
  if (used.empty()) throw ValidationError("GP fit needs at least one finite record");
  const auto n = static_cast<Eigen::Index>(used.size());
  gp.inputs.resize(n, 2);
  VectorX y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gp.inputs.row(i) = gp.normalize(used[i]->point).transpose();
    y[i] = used[i]->mse;
  }
  gp.y_mean = y.mean();
  const Real sd = n > 1 ? std::sqrt((y.array() - gp.y_mean).square().mean()) : 0.0;
  gp.y_scale = sd > 0 ? sd : 1.0;
  gp.targets = (y.array() - gp.y_mean) / gp.y_scale;
  return gp;
}

// false when every jitter level fails
bool factorize(GPModel& gp) {
  const Eigen::Index n = gp.inputs.rows();
  MatrixX k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = gp.kernel(gp.inputs.row(i).transpose(), gp.inputs.row(j).transpose());
      k(j, i) = k(i, j);
    }
  }
  for (Real jitter = 1e-8; jitter <= 1e-4 * (1 + 1e-9); jitter *= 10) {
    MatrixX kj = k;
    kj.diagonal().array() += gp.noise + jitter;
    gp.factor.compute(kj);
    if (gp.factor.info() != Eigen::Success) continue;
    const auto& l = gp.factor.matrixLLT();
    if (!(l.diagonal().array() > 0).all()) continue;
    gp.jitter = jitter;
    gp.alpha = gp.factor.solve(gp.targets);
    gp.log_marginal_likelihood = -0.5 * gp.targets.dot(gp.alpha) -
                                 l.diagonal().array().log().sum() -
                                 0.5 * static_cast<Real>(n) * std::log(2 * std::numbers::pi);
    return std::isfinite(gp.log_marginal_likelihood);
  }
  return false;
}

}  // namespace

GPModel gp_fit_fixed(const EvalHistory& history, const SearchBounds& bounds, Real noise,
                     const GpHyper& hyper) {
  GPModel gp = prepare(history, bounds, noise);
  gp.hyper = hyper;
  if (!factorize(gp)) throw Error("GP kernel matrix not positive definite after jitter 1e-4");
  return gp;
}

GPModel gp_fit(const EvalHistory& history, const SearchBounds& bounds, Real noise) {
  const GPModel base = prepare(history, bounds, noise);
  GPModel best;
  bool found = false;
  for (Real lk : gp_lengthscale_grid()) {
    for (Real ll : gp_lengthscale_grid()) {
      for (Real s2 : gp_signal_variance_grid()) {
        GPModel gp = base;
        gp.hyper = {lk, ll, s2};
        if (!factorize(gp)) continue;
        if (!found || gp.log_marginal_likelihood > best.log_marginal_likelihood) {
          best = std::move(gp);
          found = true;
        }
      }
    }
  }
  if (!found) throw Error("GP kernel matrix not positive definite after jitter 1e-4");
  return best;
}

Prediction gp_predict(const GPModel& gp, GridPoint p) {
  if (!gp.bounds.contains(p)) throw ValidationError("GP query outside the search bounds");
  const Eigen::Vector2d x = gp.normalize(p);
  const Eigen::Index n = gp.inputs.rows();
  VectorX ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks[i] = gp.kernel(gp.inputs.row(i).transpose(), x);
  const Real mean = ks.dot(gp.alpha);
  const VectorX v = gp.factor.matrixL().solve(ks);
  const Real var = std::max(0.0, gp.hyper.signal_variance - v.squaredNorm());
  return {gp.y_mean + gp.y_scale * mean, gp.y_scale * std::sqrt(var)};
}

Real expected_improvement(Real mean, Real stdev, Real best) {
  if (stdev < 0) throw ValidationError("expected_improvement: negative stdev");
  const Real gap = best - mean;
  if (stdev == 0) return std::max(gap, 0.0);
  const Real z = gap / stdev;
  const Real cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const Real pdf = std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
  return std::max(0.0, gap * cdf + stdev * pdf);
}

Real ucb_score(Real mean, Real stdev, Real kappa) {
  if (stdev < 0) throw ValidationError("ucb_score: negative stdev");
  if (kappa < 0) throw ValidationError("ucb_score: negative kappa");
  return mean - kappa * stdev;
}

}  // namespace meshgnn
