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

#ifndef MESHGNN_REMESH_HPP
#define MESHGNN_REMESH_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "meshgnn/mesh.hpp"

namespace meshgnn {

/// Face-to-cluster assignment from discrete centroidal Voronoi clustering.
struct Clustering {
  std::vector<int> assignment;  // one cluster id in [0, l) per face
  int l = 0;
  Real energy = 0;
};

/// Isotropic discrete CVD energy: sum over faces of area * |centroid - b_c|^2,
/// where b_c is the area-weighted centroid of the face's cluster.
Real cvd_energy(const TriMesh& mesh, const std::vector<int>& assignment, int l);

/// Area-weighted centroid of every cluster.
std::vector<Vec3> cluster_centroids(const TriMesh& mesh, const Clustering& clustering);

/// True when every cluster is non-empty and edge-connected.
bool clusters_connected(const TriMesh& mesh, const Clustering& clustering);

/// Picks l distinct seed faces and grows regions breadth-first over face
/// adjacency. Equal-distance ties go to the lower cluster id.
Clustering seed_clusters(const TriMesh& mesh, int l, std::uint64_t seed);

struct OptimizeTrace {
  std::vector<Real> sweep_energies;  // energy after each sweep, first entry is the input
  long swaps = 0;
  bool repaired = false;
};

/// Boundary-face reassignment sweeps in face-index order; a move is taken only
/// when it strictly lowers the energy and keeps the source cluster connected.
/// A repair pass then restores exactly l connected clusters.
Clustering optimize_clusters(const TriMesh& mesh, const Clustering& init,
                             OptimizeTrace* trace = nullptr);

/// Splits disconnected clusters and merges the smallest fragments into the
/// adjacent cluster with the lowest energy increase until l clusters remain.
Clustering repair_clusters(const TriMesh& mesh, const Clustering& clustering);

/// Straight-line dual of a clustering: one vertex per cluster at its
/// area-weighted centroid, triangles at vertices shared by three or more
/// clusters.
TriMesh dual_remesh(const TriMesh& mesh, const Clustering& clustering);

/// subdivide -> seed -> optimize -> dual.
TriMesh remesh_pipeline(const TriMesh& mesh, const MeshSizeParams& params, std::uint64_t seed,
                        std::size_t max_faces = kDefaultMaxFaces);

/// One cluster id per line, in face order.
void save_assignment(const Clustering& clustering, const std::filesystem::path& path);

}  // namespace meshgnn

#endif  // MESHGNN_REMESH_HPP
