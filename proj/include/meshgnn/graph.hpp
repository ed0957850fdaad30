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

#ifndef MESHGNN_GRAPH_HPP
#define MESHGNN_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "meshgnn/mesh.hpp"

namespace meshgnn {

/// Node coordinates (N x 3) and unordered unique edges.
struct Graph {
  MatrixX coords;
  std::vector<std::pair<int, int>> edges;

  int node_count() const { return static_cast<int>(coords.rows()); }
};

enum class AdjacencyPolicy { WeightedL2, GcnNormalized };

std::string to_string(AdjacencyPolicy policy);
AdjacencyPolicy adjacency_policy_from_string(const std::string& name);

struct AdjacencyMatrix {
  MatrixX values;
  AdjacencyPolicy policy = AdjacencyPolicy::WeightedL2;
};

/// Throws ValidationError on out-of-range endpoints, self edges, duplicates.
void validate(const Graph& graph);

/// Nodes are the mesh vertices in order; edges are the unique mesh edges.
Graph mesh_to_graph(const TriMesh& mesh);

/// Entry (i, j) is the Euclidean length of edge {i, j}, zero otherwise.
AdjacencyMatrix build_adjacency_weighted(const Graph& graph);

/// D^-1/2 (A + I) D^-1/2 with binary A and D the row sums of A + I.
AdjacencyMatrix build_adjacency_gcn(const Graph& graph);

AdjacencyMatrix build_adjacency(const Graph& graph, AdjacencyPolicy policy);

/// Same matrix in compressed storage, for propagation.
Eigen::SparseMatrix<Real> sparse_view(const AdjacencyMatrix& adjacency);

/// Builds the compressed matrix directly, entry-for-entry equal to
/// sparse_view(build_adjacency(graph, policy)) without the N x N buffer.
Eigen::SparseMatrix<Real> build_sparse_adjacency(const Graph& graph, AdjacencyPolicy policy);

/// Per-axis min-max record fitted on a subset of graphs.
struct FeatureScaling {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
  std::vector<std::string> warnings;

  /// (x - min) / (max - min) per axis; a constant axis maps to 0.
  MatrixX apply(const MatrixX& coords) const;
};

struct ScaledGraphs {
  std::vector<Graph> graphs;
  FeatureScaling record;
};

ScaledGraphs scale_node_features(const std::vector<Graph>& dataset,
                                 const std::vector<int>& fit_indices);

/// Train / validation / test indices, 80/10/10 with floor rounding.
struct DatasetSplit {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

DatasetSplit split_dataset(int n, std::uint64_t seed);

// Graph cache record --------------------------------------------------------
//
//   graph <nodes> <edges>
//   v <x> <y> <z>          (nodes lines, 9 significant digits)
//   e <i> <j>              (edges lines, 0-based)

std::string format_graph(const Graph& graph);
Graph parse_graph(const std::string& text);
void save_graph(const Graph& graph, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

}  // namespace meshgnn

#endif  // MESHGNN_GRAPH_HPP
