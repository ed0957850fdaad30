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

// Shared mesh fixtures for the test suites.

#ifndef MESHGNN_TESTS_FIXTURES_HPP
#define MESHGNN_TESTS_FIXTURES_HPP

#include <cmath>
#include <map>

#include "meshgnn/mesh.hpp"

namespace meshgnn::testing {

inline TriMesh single_triangle() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.faces = {{0, 1, 2}};
  return m;
}

inline TriMesh tetrahedron() {
  TriMesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

inline TriMesh octahedron() {
  TriMesh m;
  m.vertices = {Vec3(1, 0, 0),  Vec3(-1, 0, 0), Vec3(0, 1, 0),
                Vec3(0, -1, 0), Vec3(0, 0, 1),  Vec3(0, 0, -1)};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

inline TriMesh unit_cube() {
  TriMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

inline TriMesh icosahedron() {
  const Real t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

// Icosahedron subdivided `levels` times with vertices pushed to the sphere.
inline TriMesh icosphere(int levels, Real radius = 1.0) {
  TriMesh m = subdivide(icosahedron(), levels);
  for (Vec3& v : m.vertices) v = radius * v.normalized();
  return m;
}

// Icosahedron stretched along x; its faces are far from equilateral.
inline TriMesh stretched_icosahedron(Real factor = 3.0) {
  TriMesh m = icosahedron();
  for (Vec3& v : m.vertices) v.x() *= factor;
  return m;
}

inline std::string obj_text(const TriMesh& m) { return format_obj(m); }

inline std::string stl_text(const TriMesh& m) {
  std::string s = "solid fixture\n";
  char buf[160];
  for (const Face& t : m.faces) {
    s += "facet normal 0 0 0\n outer loop\n";
    for (int i : t) {
      std::snprintf(buf, sizeof buf, "  vertex %.17g %.17g %.17g\n", m.vertices[i].x(),
                    m.vertices[i].y(), m.vertices[i].z());
      s += buf;
    }
    s += " endloop\nendfacet\n";
  }
  return s + "endsolid fixture\n";
}

}  // namespace meshgnn::testing

#endif  // MESHGNN_TESTS_FIXTURES_HPP
