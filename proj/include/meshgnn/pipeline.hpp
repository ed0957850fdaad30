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

#ifndef MESHGNN_PIPELINE_HPP
#define MESHGNN_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "meshgnn/labels.hpp"
#include "meshgnn/mesh.hpp"
#include "meshgnn/nn.hpp"
#include "meshgnn/optimizer.hpp"

namespace meshgnn {

/// Meshes with their three oracle labels, index-aligned.
struct LabeledDataset {
  std::vector<std::string> names;
  std::vector<ShapeParams> shapes;
  std::vector<TriMesh> meshes;
  std::vector<OracleLabels> labels;

  std::size_t size() const { return meshes.size(); }
  std::vector<Real> values(Performance p) const;
};

/// Samples `count` valid wheels; shape i draws from a stream derived from
/// (seed, i), so the dataset is a prefix-stable function of the seed.
LabeledDataset generate_dataset(int count, const ShapeRanges& ranges, int resolution,
                                std::uint64_t seed);

/// Steps 2-3 on every mesh; mesh i clusters with a seed derived from (seed, i).
std::vector<TriMesh> remesh_dataset(const std::vector<TriMesh>& meshes,
                                    const MeshSizeParams& params, std::uint64_t seed,
                                    std::size_t max_faces = kDefaultMaxFaces);

std::vector<Graph> graphs_of(const std::vector<TriMesh>& meshes);

std::vector<Real> subset(const std::vector<Real>& values, const std::vector<int>& indices);
std::vector<Graph> subset(const std::vector<Graph>& graphs, const std::vector<int>& indices);

struct ExperimentOutcome {
  TrainedModel model;
  Metrics train;
  Metrics validation;
  Metrics test;
};

/// Trains on the split of `graphs` and evaluates every split in physical units.
ExperimentOutcome run_experiment(const std::vector<Graph>& graphs,
                                 const std::vector<Real>& labels, Performance performance,
                                 const DatasetSplit& split, const ModelConfig& model,
                                 const TrainConfig& train);

/// (k, l) -> validation MSE in scaled-label space of a model trained on the
/// dataset re-meshed at (k, l).
struct SurrogateObjective {
  const LabeledDataset* data = nullptr;
  Performance performance = Performance::Mass;
  DatasetSplit split;
  ModelConfig model;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::size_t max_faces = kDefaultMaxFaces;

  Real operator()(GridPoint p) const;
};

}  // namespace meshgnn

#endif  // MESHGNN_PIPELINE_HPP
