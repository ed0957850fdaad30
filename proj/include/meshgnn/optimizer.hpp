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

#ifndef MESHGNN_OPTIMIZER_HPP
#define MESHGNN_OPTIMIZER_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "meshgnn/core.hpp"

namespace meshgnn {

struct GridPoint {
  int k = 0;
  int l = 0;

  auto operator<=>(const GridPoint&) const = default;
};

/// Inclusive integer box over (k, l).
struct SearchBounds {
  int k_min = 2;
  int k_max = 4;
  int l_min = 3000;
  int l_max = 5000;

  void validate() const;
  bool contains(GridPoint p) const;
  long grid_size() const;
};

struct EvalRecord {
  GridPoint point;
  Real mse = 0;  // +inf marks a failed evaluation
};

using EvalHistory = std::vector<EvalRecord>;

// Gaussian process surrogate -------------------------------------------------

/// Matern-5/2 correlation at scaled distance r.
Real matern52(Real r);

struct GpHyper {
  Real lengthscale_k = 1;
  Real lengthscale_l = 1;
  Real signal_variance = 1;
};

/// Exact GP regression on inputs mapped to [0,1]^2 and standardized targets.
struct GPModel {
  SearchBounds bounds;
  MatrixX inputs;   // n x 2, normalized
  VectorX targets;  // standardized
  Real y_mean = 0;
  Real y_scale = 1;
  GpHyper hyper;
  Real noise = 0;
  Real jitter = 0;
  Real log_marginal_likelihood = 0;
  Eigen::LLT<MatrixX> factor;
  VectorX alpha;

  Eigen::Vector2d normalize(GridPoint p) const;
  Real kernel(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
};

/// Hyperparameters maximize the log marginal likelihood over a fixed 5x5x5
/// grid. Records with non-finite mse are skipped.
GPModel gp_fit(const EvalHistory& history, const SearchBounds& bounds, Real noise = 1e-6);

/// Fits one hyperparameter setting; throws when the kernel matrix cannot be
/// factorized even with jitter 1e-4.
GPModel gp_fit_fixed(const EvalHistory& history, const SearchBounds& bounds, Real noise,
                     const GpHyper& hyper);

const std::vector<Real>& gp_lengthscale_grid();
const std::vector<Real>& gp_signal_variance_grid();

struct Prediction {
  Real mean = 0;
  Real stdev = 0;
};

Prediction gp_predict(const GPModel& gp, GridPoint p);

// Acquisitions ----------------------------------------------------------------

/// Expected improvement below `best` (minimization).
Real expected_improvement(Real mean, Real stdev, Real best);

/// Lower is more promising.
Real ucb_score(Real mean, Real stdev, Real kappa);

enum class Acquisition { ExpectedImprovement, Ucb };

struct AcquisitionConfig {
  Acquisition kind = Acquisition::ExpectedImprovement;
  Real kappa = 2.0;
};

std::string to_string(Acquisition a);

/// Largest `score` over unevaluated grid points; ties go to the
/// lexicographically smallest (k, l). Throws when the grid is exhausted.
GridPoint argmax_over_grid(const SearchBounds& bounds, const EvalHistory& evaluated,
                           const std::function<Real(GridPoint)>& score);

GridPoint propose_next(const GPModel& gp, const SearchBounds& bounds,
                       const AcquisitionConfig& acquisition, const EvalHistory& history);

// Search loops ------------------------------------------------------------------

using Objective = std::function<Real(GridPoint)>;

struct TraceRow {
  int t = 0;
  GridPoint point;
  Real mse = 0;
  Real best_so_far = 0;
  double wall_seconds = 0;
};

struct SearchResult {
  std::string strategy;
  std::uint64_t seed = 0;
  EvalRecord best;
  EvalHistory history;
  std::vector<TraceRow> trace;
};

struct BoConfig {
  SearchBounds bounds;
  int t_max = 20;
  int p_max = 5;
  AcquisitionConfig acquisition;
  Real noise = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Iteration 1 evaluates a seeded-random point; later iterations refit the GP
/// and maximize the acquisition. Patience resets to 1 on improvement.
SearchResult bo_loop(const Objective& objective, const BoConfig& config);

struct McmcConfig {
  SearchBounds bounds;
  std::optional<Real> temperature;  // default 0.1 x first evaluated mse
  std::optional<Real> sigma_l;      // default 5% of the l range
  Real k_step_probability = 0.3;
  int max_evaluations = 20;  // distinct objective calls
  long max_steps = 0;        // 0: 1000 x max_evaluations
  std::uint64_t seed = 0;

  void validate() const;
};

struct ChainStep {
  GridPoint state;
  Real mse = 0;
  bool accepted = false;
};

struct McmcResult {
  SearchResult search;
  std::vector<ChainStep> chain;
  Real temperature = 0;
  Real sigma_l = 0;
};

/// Reflects an integer onto [lo, hi] by folding about lo - 1/2 and hi + 1/2.
int reflect_into(long x, int lo, int hi);

/// Random-walk Metropolis on exp(-mse / T). Repeated states reuse their
/// cached objective value.
McmcResult mcmc_search(const Objective& objective, const McmcConfig& config);

struct StrategyCurve {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<Real> best_so_far;  // one entry per evaluation
  double wall_seconds = 0;
  EvalRecord best;
};

struct ComparisonReport {
  int budget = 0;
  std::vector<StrategyCurve> curves;
  std::vector<SearchResult> runs;  // every underlying run, for the history log

  std::vector<Real> final_bests(const std::string& strategy) const;
};

/// BO-EI, BO-UCB and MCMC under the same evaluation budget. Each MCMC curve is
/// the mean of `mcmc_repeats` chains.
ComparisonReport compare_strategies(const Objective& objective, const SearchBounds& bounds,
                                    int budget, const std::vector<std::uint64_t>& seeds,
                                    int mcmc_repeats = 10, Real noise = 1e-6, Real kappa = 2.0);

// Logs ------------------------------------------------------------------------

std::string history_csv_header();
std::string history_csv_rows(const SearchResult& run);
void write_history_csv(const std::vector<SearchResult>& runs, const std::filesystem::path& path);
void write_comparison_csv(const ComparisonReport& report, const std::filesystem::path& path);

}  // namespace meshgnn

#endif  // MESHGNN_OPTIMIZER_HPP
