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

#ifndef MESHGNN_ANALYSIS_HPP
#define MESHGNN_ANALYSIS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meshgnn/labels.hpp"
#include "meshgnn/nn.hpp"
#include "meshgnn/optimizer.hpp"

namespace meshgnn {

/// Pearson correlation coefficient. Throws on unequal lengths, fewer than two
/// pairs, or a constant input.
template <typename A, typename B>
typename A::Scalar pearson(const Eigen::MatrixBase<A>& xs, const Eigen::MatrixBase<B>& ys) {
  using S = typename A::Scalar;
  if (xs.size() != ys.size()) throw ValidationError("pearson: inputs differ in length");
  if (xs.size() < 2) throw ValidationError("pearson: needs at least two pairs");
  const auto dx = (xs.array() - xs.mean()).eval();
  const auto dy = (ys.array() - ys.mean()).eval();
  const S sxx = dx.square().sum();
  const S syy = dy.square().sum();
  if (sxx == S(0) || syy == S(0)) throw ValidationError("pearson: constant input");
  using std::sqrt;
  const S r = (dx * dy).sum() / sqrt(sxx * syy);
  return r > S(1) ? S(1) : (r < S(-1) ? S(-1) : r);
}

inline Real pearson(const std::vector<Real>& xs, const std::vector<Real>& ys) {
  using Map = Eigen::Map<const VectorX>;
  return pearson(Map(xs.data(), static_cast<Eigen::Index>(xs.size())),
                 Map(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

struct StudySample {
  GridPoint point;
  Real q_min = 0;
  Real q_max = 0;
  std::array<Real, 3> r2{};  // indexed like kAllPerformances
};

struct StudyExclusion {
  GridPoint point;
  std::string reason;
};

struct PearsonEntry {
  Performance performance = Performance::Mass;
  std::string quality;  // "q_min" or "q_max"
  Real r = 0;
};

struct StudyReport {
  int requested = 0;
  std::vector<StudySample> rows;
  std::vector<StudyExclusion> excluded;
  std::vector<PearsonEntry> pearson;
  std::vector<std::string> warnings;
};

/// Uniform over the integer grid without replacement. `include` (if given and
/// in bounds) replaces the first draw.
std::vector<GridPoint> sample_grid_points(const SearchBounds& bounds, int count,
                                          std::uint64_t seed,
                                          std::optional<GridPoint> include = std::nullopt);

/// Evaluates one (k, l) sample; the seed is derived per sample.
using SampleEvaluator = std::function<StudySample(GridPoint, std::uint64_t)>;

/// Runs every point, excludes failures with a warning, then correlates mesh
/// quality with R^2 for each performance.
StudyReport run_study(const std::vector<GridPoint>& points, const SampleEvaluator& evaluate,
                      std::uint64_t seed);

struct LabeledDataset;

struct StudyConfig {
  SearchBounds bounds{0, 2, 200, 600};
  int samples = 12;
  std::uint64_t seed = 0;
  std::optional<GridPoint> include;
  ModelConfig model;
  TrainConfig train;
  std::size_t max_faces = kDefaultMaxFaces;
};

/// Re-meshes the dataset at each sampled (k, l), measures quality, trains one
/// model per performance and records its test R^2.
StudyReport quality_accuracy_study(const LabeledDataset& data, const DatasetSplit& split,
                                   const StudyConfig& config);

void write_study_csv(const StudyReport& report, const std::filesystem::path& path);
void write_pearson_csv(const StudyReport& report, const std::filesystem::path& path);

}  // namespace meshgnn

#endif  // MESHGNN_ANALYSIS_HPP
