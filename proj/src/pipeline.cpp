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

#include "meshgnn/pipeline.hpp"

#include <cstdio>

#include "meshgnn/remesh.hpp"

namespace meshgnn {

std::vector<Real> LabeledDataset::values(Performance p) const {
  std::vector<Real> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.get(p));
  return out;
}

LabeledDataset generate_dataset(int count, const ShapeRanges& ranges, int resolution,
                                std::uint64_t seed) {
  if (count < 1) throw ValidationError("dataset size must be at least 1");
  validate(ranges);
  LabeledDataset ds;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, "shape", static_cast<std::uint64_t>(i)));
    ShapeParams shape;
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      shape = sample_shape(ranges, rng);
      try {
        validate(shape, resolution);
        ok = true;
      } catch (const ValidationError&) {
      }
    }
    if (!ok) throw ValidationError("shape ranges yield no valid wheel at this resolution");
    TriMesh mesh = generate_shape(shape, resolution);
    char name[32];
    std::snprintf(name, sizeof name, "wheel_%04d", i);
    ds.names.push_back(name);
    ds.labels.push_back(oracle_labels(mesh, shape.density));
    ds.shapes.push_back(shape);
    ds.meshes.push_back(std::move(mesh));
  }
  return ds;
}

std::vector<TriMesh> remesh_dataset(const std::vector<TriMesh>& meshes,
                                    const MeshSizeParams& params, std::uint64_t seed,
                                    std::size_t max_faces) {
  std::vector<TriMesh> out;
  out.reserve(meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    out.push_back(remesh_pipeline(meshes[i], params, derive_seed(seed, "remesh", i), max_faces));
  }
  return out;
}

std::vector<Graph> graphs_of(const std::vector<TriMesh>& meshes) {
  std::vector<Graph> out;
  out.reserve(meshes.size());
  for (const auto& m : meshes) out.push_back(mesh_to_graph(m));
  return out;
}

std::vector<Real> subset(const std::vector<Real>& values, const std::vector<int>& indices) {
  std::vector<Real> out;
  for (int i : indices) out.push_back(values.at(static_cast<std::size_t>(i)));
  return out;
}

std::vector<Graph> subset(const std::vector<Graph>& graphs, const std::vector<int>& indices) {
  std::vector<Graph> out;
  for (int i : indices) out.push_back(graphs.at(static_cast<std::size_t>(i)));
  return out;
}

ExperimentOutcome run_experiment(const std::vector<Graph>& graphs,
                                 const std::vector<Real>& labels, Performance performance,
                                 const DatasetSplit& split, const ModelConfig& model,
                                 const TrainConfig& train) {
  ExperimentOutcome out;
  out.model = fit_model(graphs, labels, performance, split, model, train);
  out.train = evaluate(out.model, subset(graphs, split.train), subset(labels, split.train));
  out.validation =
      evaluate(out.model, subset(graphs, split.validation), subset(labels, split.validation));
  out.test = evaluate(out.model, subset(graphs, split.test), subset(labels, split.test));
  return out;
}

Real SurrogateObjective::operator()(GridPoint p) const {
  if (!data) throw ValidationError("surrogate objective has no dataset");
  const auto meshes = remesh_dataset(data->meshes, {p.k, p.l}, seed, max_faces);
  const TrainedModel m =
      fit_model(graphs_of(meshes), data->values(performance), performance, split, model, train);
  return m.best_val_loss;
}

}  // namespace meshgnn
