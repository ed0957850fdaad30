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

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "meshgnn/mesh.hpp"

namespace meshgnn {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Parses the vertex part of an OBJ face token ("7", "7/1", "7//3", "-1").
int obj_index(const std::string& token, int vertex_count, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  std::size_t used = 0;
  int idx = 0;
  try {
    idx = std::stoi(head, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != head.size()) {
    throw ValidationError("OBJ line " + std::to_string(line_no) + ": bad face index '" + token +
                          "'");
  }
  if (idx < 0) idx = vertex_count + idx + 1;
  if (idx < 1 || idx > vertex_count) {
    throw ValidationError("OBJ line " + std::to_string(line_no) + ": face index " + head +
                          " out of range");
  }
  return idx - 1;
}

// Merges vertices closer than `tol` using a uniform hash grid.
class Welder {
 public:
  explicit Welder(Real tol) : tol_(tol), cell_(tol > 0 ? tol : 1.0) {}

  int insert(const Vec3& p) {
    const auto key = cell_of(p);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find(hash({key[0] + dx, key[1] + dy, key[2] + dz}));
          if (it == grid_.end()) continue;
          for (int idx : it->second) {
            if ((points_[idx] - p).norm() <= tol_) return idx;
          }
        }
      }
    }
    const int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[hash(key)].push_back(idx);
    return idx;
  }

  std::vector<Vec3> take() { return std::move(points_); }

 private:
  std::array<long, 3> cell_of(const Vec3& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)),
            static_cast<long>(std::floor(p.y() / cell_)),
            static_cast<long>(std::floor(p.z() / cell_))};
  }
  static std::uint64_t hash(const std::array<long, 3>& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (long v : c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return h;
  }

  Real tol_;
  Real cell_;
  std::vector<Vec3> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lowercase(path.extension().string());
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".stl") return MeshFormat::StlAscii;
  throw ValidationError("unrecognised mesh extension '" + ext + "'");
}

TriMesh parse_obj(const std::string& text) {
  TriMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw ValidationError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      const auto n = static_cast<int>(mesh.vertices.size());
      while (ls >> tok) poly.push_back(obj_index(tok, n, line_no));
      if (poly.size() < 3) {
        throw ValidationError("OBJ line " + std::to_string(line_no) + ": face needs 3 indices");
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
  }
  validate(mesh);
  return mesh;
}

TriMesh parse_stl_ascii(const std::string& text) {
  std::vector<Vec3> corners;
  std::istringstream in(text);
  std::string tok;
  bool solid = false;
  while (in >> tok) {
    tok = lowercase(tok);
    if (tok == "solid") solid = true;
    if (tok == "vertex") {
      Vec3 p;
      if (!(in >> p.x() >> p.y() >> p.z())) throw ValidationError("STL: malformed vertex record");
      corners.push_back(p);
    }
  }
  if (!solid) throw ValidationError("STL: missing 'solid' header (binary STL is unsupported)");
  if (corners.empty()) throw ValidationError("STL: no facets");
  if (corners.size() % 3 != 0) throw ValidationError("STL: vertex count is not a multiple of 3");

  Vec3 lo = corners[0], hi = corners[0];
  for (const Vec3& p : corners) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Welder welder(1e-6 * (hi - lo).norm());
  TriMesh mesh;
  for (std::size_t i = 0; i < corners.size(); i += 3) {
    mesh.faces.push_back(
        {welder.insert(corners[i]), welder.insert(corners[i + 1]), welder.insert(corners[i + 2])});
  }
  mesh.vertices = welder.take();
  validate(mesh);
  return mesh;
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string text = read_file(path);
  return format == MeshFormat::Obj ? parse_obj(text) : parse_stl_ascii(text);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, format_from_path(path));
}

std::string format_obj(const TriMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 20);
  char buf[128];
  for (const Vec3& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  for (const Face& t : mesh.faces) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_obj(mesh);
}

}  // namespace meshgnn
