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

#ifndef MESHGNN_MESH_HPP
#define MESHGNN_MESH_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "meshgnn/core.hpp"

namespace meshgnn {

using Face = std::array<int, 3>;

/// Indexed triangle surface mesh. Coordinates keep the units of the input.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

/// Squared-area threshold below which a face is degenerate.
inline constexpr Real kDegenerateAreaSq = 1e-12;

/// Interior angles of one triangle in degrees, in vertex order.
struct AngleTriple {
  std::array<Real, 3> degrees{};

  Real min() const;
  Real max() const;
};

/// The two re-meshing hyperparameters: subdivision count k and cluster count l.
struct MeshSizeParams {
  int k = 0;
  int l = 4;
};

struct QualityReport {
  Real q_min = 0;
  Real q_max = 0;
  std::vector<Real> per_mesh_min;
  std::vector<Real> per_mesh_max;
};

struct MeshStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t faces = 0;

  long euler_characteristic() const {
    return static_cast<long>(nodes) - static_cast<long>(edges) + static_cast<long>(faces);
  }
};

enum class MeshFormat { Obj, StlAscii };

MeshFormat format_from_path(const std::filesystem::path& path);

// IO ------------------------------------------------------------------------

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh parse_obj(const std::string& text);
TriMesh parse_stl_ascii(const std::string& text);

/// OBJ writer; coordinates rendered with 9 significant digits.
std::string format_obj(const TriMesh& mesh);
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

// Validation and topology ---------------------------------------------------

/// Throws ValidationError on empty meshes, bad indices, repeated indices and
/// degenerate faces.
void validate(const TriMesh& mesh);

Real face_area(const TriMesh& mesh, std::size_t f);
Vec3 face_centroid(const TriMesh& mesh, std::size_t f);

/// Unique undirected edges as (min, max) index pairs, sorted.
std::vector<std::pair<int, int>> unique_edges(const TriMesh& mesh);

MeshStats mesh_stats(const TriMesh& mesh);

/// True when every edge is shared by exactly two faces.
bool is_closed_manifold(const TriMesh& mesh);

/// For each face, the indices of faces sharing an edge with it.
std::vector<std::vector<int>> face_adjacency(const TriMesh& mesh);

// Subdivision ---------------------------------------------------------------

inline constexpr std::size_t kDefaultMaxFaces = 10'000'000;

/// Midpoint (1-to-4) subdivision applied k times.
TriMesh subdivide(const TriMesh& mesh, int k, std::size_t max_faces = kDefaultMaxFaces);

// Quality -------------------------------------------------------------------

AngleTriple triangle_angles(const Vec3& p0, const Vec3& p1, const Vec3& p2);

/// Dataset-mean of the per-mesh mean smallest interior angle (degrees).
Real quality_min(const std::vector<TriMesh>& dataset);
/// Dataset-mean of the per-mesh mean largest interior angle (degrees).
Real quality_max(const std::vector<TriMesh>& dataset);
QualityReport quality_report(const std::vector<TriMesh>& dataset);

}  // namespace meshgnn

#endif  // MESHGNN_MESH_HPP
