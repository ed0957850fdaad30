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

#include "meshgnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace meshgnn {

std::string to_string(AdjacencyPolicy policy) {
  return policy == AdjacencyPolicy::WeightedL2 ? "weighted-l2" : "gcn-normalized";
}

AdjacencyPolicy adjacency_policy_from_string(const std::string& name) {
  if (name == "weighted-l2" || name == "gnn") return AdjacencyPolicy::WeightedL2;
  if (name == "gcn-normalized" || name == "gcn") return AdjacencyPolicy::GcnNormalized;
  throw ValidationError("unknown adjacency policy '" + name + "'");
}

void validate(const Graph& graph) {
  if (graph.coords.cols() != 3) throw ValidationError("graph coordinates must have 3 columns");
  const int n = graph.node_count();
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : graph.edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw ValidationError("graph edge endpoint out of range");
    if (a == b) throw ValidationError("graph has a self edge");
    if (!seen.insert(std::minmax(a, b)).second) throw ValidationError("graph has a duplicate edge");
  }
}

Graph mesh_to_graph(const TriMesh& mesh) {
  Graph g;
  g.coords.resize(static_cast<Eigen::Index>(mesh.vertices.size()), 3);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    g.coords.row(static_cast<Eigen::Index>(i)) = mesh.vertices[i].transpose();
  }
  g.edges = unique_edges(mesh);
  return g;
}

AdjacencyMatrix build_adjacency_weighted(const Graph& graph) {
  validate(graph);
  const int n = graph.node_count();
  AdjacencyMatrix a{MatrixX::Zero(n, n), AdjacencyPolicy::WeightedL2};
  for (auto [i, j] : graph.edges) {
    const Real d = (graph.coords.row(i) - graph.coords.row(j)).norm();
    if (d == 0) {
      throw ValidationError("connected nodes " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide; a zero weight would read as no edge");
    }
    a.values(i, j) = d;
    a.values(j, i) = d;
  }
  return a;
}

AdjacencyMatrix build_adjacency_gcn(const Graph& graph) {
  validate(graph);
  const int n = graph.node_count();
  MatrixX hat = MatrixX::Identity(n, n);
  for (auto [i, j] : graph.edges) {
    hat(i, j) = 1;
    hat(j, i) = 1;
  }
  const VectorX inv_sqrt_deg = hat.rowwise().sum().cwiseSqrt().cwiseInverse();
  return {inv_sqrt_deg.asDiagonal() * hat * inv_sqrt_deg.asDiagonal(),
          AdjacencyPolicy::GcnNormalized};
}

AdjacencyMatrix build_adjacency(const Graph& graph, AdjacencyPolicy policy) {
  return policy == AdjacencyPolicy::WeightedL2 ? build_adjacency_weighted(graph)
                                               : build_adjacency_gcn(graph);
}

Eigen::SparseMatrix<Real> sparse_view(const AdjacencyMatrix& adjacency) {
  return adjacency.values.sparseView(0.0, 0.0);
}

Eigen::SparseMatrix<Real> build_sparse_adjacency(const Graph& graph, AdjacencyPolicy policy) {
  validate(graph);
  const int n = graph.node_count();
  std::vector<Eigen::Triplet<Real>> entries;
  entries.reserve(2 * graph.edges.size() + static_cast<std::size_t>(n));
  if (policy == AdjacencyPolicy::WeightedL2) {
    for (auto [i, j] : graph.edges) {
      const Real d = (graph.coords.row(i) - graph.coords.row(j)).norm();
      if (d == 0) {
        throw ValidationError("connected nodes " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
      }
      entries.emplace_back(i, j, d);
      entries.emplace_back(j, i, d);
    }
  } else {
    std::vector<Real> degree(n, 1.0);
    for (auto [i, j] : graph.edges) {
      degree[i] += 1;
      degree[j] += 1;
    }
    VectorX inv(n);
    for (int i = 0; i < n; ++i) inv[i] = 1.0 / std::sqrt(degree[i]);
    for (int i = 0; i < n; ++i) entries.emplace_back(i, i, inv[i] * 1.0 * inv[i]);
    for (auto [i, j] : graph.edges) {
      entries.emplace_back(i, j, inv[i] * 1.0 * inv[j]);
      entries.emplace_back(j, i, inv[j] * 1.0 * inv[i]);
    }
  }
  Eigen::SparseMatrix<Real> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

MatrixX FeatureScaling::apply(const MatrixX& coords) const {
  MatrixX out(coords.rows(), coords.cols());
  for (int axis = 0; axis < 3; ++axis) {
    const Real span = max[axis] - min[axis];
    if (span > 0) {
      out.col(axis) = (coords.col(axis).array() - min[axis]) / span;
    } else {
      out.col(axis).setZero();
    }
  }
  return out;
}

ScaledGraphs scale_node_features(const std::vector<Graph>& dataset,
                                 const std::vector<int>& fit_indices) {
  if (fit_indices.empty()) throw ValidationError("feature scaling needs a non-empty fit set");
  FeatureScaling rec;
  rec.min = Vec3::Constant(std::numeric_limits<Real>::infinity());
  rec.max = Vec3::Constant(-std::numeric_limits<Real>::infinity());
  for (int i : fit_indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= dataset.size()) {
      throw ValidationError("feature fit index out of range");
    }
    const MatrixX& c = dataset[i].coords;
    if (c.rows() == 0) continue;
    rec.min = rec.min.cwiseMin(c.colwise().minCoeff().transpose());
    rec.max = rec.max.cwiseMax(c.colwise().maxCoeff().transpose());
  }
  if (!rec.min.allFinite() || !rec.max.allFinite()) {
    throw ValidationError("feature fit set has no nodes");
  }
  static const char* kAxis[] = {"x", "y", "z"};
  for (int axis = 0; axis < 3; ++axis) {
    if (rec.max[axis] == rec.min[axis]) {
      rec.warnings.push_back(std::string("axis ") + kAxis[axis] +
                             " is constant over the fit set; mapped to 0");
    }
  }
  ScaledGraphs out{{}, rec};
  out.graphs.reserve(dataset.size());
  for (const Graph& g : dataset) out.graphs.push_back({rec.apply(g.coords), g.edges});
  return out;
}

DatasetSplit split_dataset(int n, std::uint64_t seed) {
  if (n < 3) throw ValidationError("dataset split needs at least 3 samples");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<int>(uniform_int(rng, 0, i))]);
  }
  const int n_train = static_cast<int>(0.8 * n);
  const int n_val = static_cast<int>(0.1 * n);
  DatasetSplit s;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

std::string format_graph(const Graph& graph) {
  std::string out = "graph " + std::to_string(graph.node_count()) + " " +
                    std::to_string(graph.edges.size()) + "\n";
  char buf[128];
  for (Eigen::Index i = 0; i < graph.coords.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", graph.coords(i, 0), graph.coords(i, 1),
                  graph.coords(i, 2));
    out += buf;
  }
  for (auto [a, b] : graph.edges) {
    std::snprintf(buf, sizeof buf, "e %d %d\n", a, b);
    out += buf;
  }
  return out;
}

Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  long nodes = -1, edges = -1;
  if (!(in >> tag >> nodes >> edges) || tag != "graph" || nodes < 0 || edges < 0) {
    throw ValidationError("graph record: bad header");
  }
  Graph g;
  g.coords.resize(nodes, 3);
  for (long i = 0; i < nodes; ++i) {
    if (!(in >> tag) || tag != "v" || !(in >> g.coords(i, 0) >> g.coords(i, 1) >> g.coords(i, 2))) {
      throw ValidationError("graph record: bad node line " + std::to_string(i));
    }
  }
  g.edges.resize(edges);
  for (long i = 0; i < edges; ++i) {
    if (!(in >> tag) || tag != "e" || !(in >> g.edges[i].first >> g.edges[i].second)) {
      throw ValidationError("graph record: bad edge line " + std::to_string(i));
    }
  }
  validate(g);
  return g;
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_graph(graph);
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open graph file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

}  // namespace meshgnn
