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

#include "meshgnn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace meshgnn {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

Real twice_area_sq(const Vec3& a, const Vec3& b, const Vec3& c) {
  return (b - a).cross(c - a).squaredNorm();
}

Real mean_of(const std::vector<Real>& xs) {
  Real s = 0;
  for (Real x : xs) s += x;
  return s / static_cast<Real>(xs.size());
}

}  // namespace

Real AngleTriple::min() const { return std::min({degrees[0], degrees[1], degrees[2]}); }
Real AngleTriple::max() const { return std::max({degrees[0], degrees[1], degrees[2]}); }

void validate(const TriMesh& mesh) {
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw ValidationError("mesh is empty");
  }
  const auto n = static_cast<int>(mesh.vertices.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n) {
        throw ValidationError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(idx) + " out of range");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw ValidationError("face " + std::to_string(f) + " repeats a vertex index");
    }
    const Real area = face_area(mesh, f);
    if (area * area < kDegenerateAreaSq) {
      throw ValidationError("face " + std::to_string(f) + " is degenerate");
    }
  }
}

Real face_area(const TriMesh& mesh, std::size_t f) {
  const Face& t = mesh.faces[f];
  return 0.5 * std::sqrt(twice_area_sq(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                       mesh.vertices[t[2]]));
}

Vec3 face_centroid(const TriMesh& mesh, std::size_t f) {
  const Face& t = mesh.faces[f];
  return (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
}

std::vector<std::pair<int, int>> unique_edges(const TriMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& t : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

MeshStats mesh_stats(const TriMesh& mesh) {
  return {mesh.vertices.size(), unique_edges(mesh).size(), mesh.faces.size()};
}

bool is_closed_manifold(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> uses;
  uses.reserve(mesh.faces.size() * 3);
  for (const Face& t : mesh.faces) {
    for (int i = 0; i < 3; ++i) ++uses[edge_key(t[i], t[(i + 1) % 3])];
  }
  if (uses.empty()) return false;
  return std::all_of(uses.begin(), uses.end(), [](const auto& kv) { return kv.second == 2; });
}

std::vector<std::vector<int>> face_adjacency(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, std::vector<int>> by_edge;
  by_edge.reserve(mesh.faces.size() * 3);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i) {
      by_edge[edge_key(t[i], t[(i + 1) % 3])].push_back(static_cast<int>(f));
    }
  }
  std::vector<std::vector<int>> adj(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i) {
      for (int g : by_edge[edge_key(t[i], t[(i + 1) % 3])]) {
        if (g != static_cast<int>(f)) adj[f].push_back(g);
      }
    }
    std::sort(adj[f].begin(), adj[f].end());
    adj[f].erase(std::unique(adj[f].begin(), adj[f].end()), adj[f].end());
  }
  return adj;
}

TriMesh subdivide(const TriMesh& mesh, int k, std::size_t max_faces) {
  if (k < 0) throw ValidationError("subdivision count must be non-negative");
  std::size_t projected = mesh.faces.size();
  for (int i = 0; i < k; ++i) {
    if (projected > max_faces / 4) {
      throw ValidationError("subdivision with k=" + std::to_string(k) + " exceeds the " +
                            std::to_string(max_faces) + "-face limit");
    }
    projected *= 4;
  }

  TriMesh current = mesh;
  for (int level = 0; level < k; ++level) {
    TriMesh next;
    next.vertices = current.vertices;
    next.faces.reserve(current.faces.size() * 4);
    std::unordered_map<std::uint64_t, int> midpoint;
    midpoint.reserve(current.faces.size() * 2);
    auto mid = [&](int a, int b) {
      auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), 0);
      if (inserted) {
        it->second = static_cast<int>(next.vertices.size());
        next.vertices.push_back(0.5 * (current.vertices[a] + current.vertices[b]));
      }
      return it->second;
    };
    for (const Face& t : current.faces) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.faces.push_back({t[0], ab, ca});
      next.faces.push_back({ab, t[1], bc});
      next.faces.push_back({ca, bc, t[2]});
      next.faces.push_back({ab, bc, ca});
    }
    current = std::move(next);
  }
  return current;
}

AngleTriple triangle_angles(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  if (twice_area_sq(p0, p1, p2) < 4.0 * kDegenerateAreaSq) {
    throw ValidationError("degenerate triangle has no defined angles");
  }
  const std::array<const Vec3*, 3> p{&p0, &p1, &p2};
  AngleTriple out;
  for (int i = 0; i < 3; ++i) {
    const Vec3 u = *p[(i + 1) % 3] - *p[i];
    const Vec3 v = *p[(i + 2) % 3] - *p[i];
    out.degrees[i] = std::atan2(u.cross(v).norm(), u.dot(v)) * 180.0 / std::numbers::pi;
  }
  return out;
}

QualityReport quality_report(const std::vector<TriMesh>& dataset) {
  if (dataset.empty()) throw ValidationError("quality measure needs a non-empty dataset");
  QualityReport report;
  report.per_mesh_min.reserve(dataset.size());
  report.per_mesh_max.reserve(dataset.size());
  for (const TriMesh& mesh : dataset) {
    if (mesh.faces.empty()) throw ValidationError("quality measure on a mesh without faces");
    Real sum_min = 0, sum_max = 0;
    for (const Face& t : mesh.faces) {
      const AngleTriple a =
          triangle_angles(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
      sum_min += a.min();
      sum_max += a.max();
    }
    const auto s = static_cast<Real>(mesh.faces.size());
    report.per_mesh_min.push_back(sum_min / s);
    report.per_mesh_max.push_back(sum_max / s);
  }
  report.q_min = mean_of(report.per_mesh_min);
  report.q_max = mean_of(report.per_mesh_max);
  return report;
}

Real quality_min(const std::vector<TriMesh>& dataset) { return quality_report(dataset).q_min; }
Real quality_max(const std::vector<TriMesh>& dataset) { return quality_report(dataset).q_max; }

}  // namespace meshgnn
