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

#include "meshgnn/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

namespace meshgnn {

std::string to_string(Performance p) {
  switch (p) {
    case Performance::Mass:
      return "mass";
    case Performance::RimStiffness:
      return "rim_stiffness";
    case Performance::DiskStiffness:
      return "disk_stiffness";
  }
  return "unknown";
}

Performance performance_from_string(const std::string& name) {
  if (name == "mass") return Performance::Mass;
  if (name == "rim_stiffness" || name == "rim") return Performance::RimStiffness;
  if (name == "disk_stiffness" || name == "disk") return Performance::DiskStiffness;
  throw ValidationError("unknown performance '" + name + "'");
}

Real rim_stiffness(Real mass, Real frequency) {
  if (mass < 0 || frequency < 0) throw ValidationError("rim stiffness needs m >= 0 and f >= 0");
  const Real omega = 2.0 * std::numbers::pi * frequency;
  return omega * omega * mass;
}

Real disk_stiffness(Real mass, Real resonance, Real antiresonance) {
  if (mass < 0) throw ValidationError("disk stiffness needs m >= 0");
  if (!(resonance > 0) || !(antiresonance > 0)) {
    throw ValidationError("disk stiffness needs positive frequencies");
  }
  if (antiresonance >= resonance) {
    throw ValidationError("disk stiffness needs f2 < f1 (non-positive stiffness otherwise)");
  }
  const Real omega = 2.0 * std::numbers::pi * antiresonance;
  const Real ratio = antiresonance / resonance;
  return omega * omega * (mass - mass * ratio * ratio);
}

ScaledLabels scale_labels(const std::vector<Real>& values, const std::vector<int>& fit_indices) {
  if (fit_indices.empty()) throw ValidationError("label scaling needs a non-empty fit set");
  MinMaxScaler rec{std::numeric_limits<Real>::infinity(), -std::numeric_limits<Real>::infinity()};
  for (int i : fit_indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= values.size()) {
      throw ValidationError("label fit index out of range");
    }
    rec.min = std::min(rec.min, values[i]);
    rec.max = std::max(rec.max, values[i]);
  }
  if (!(rec.max > rec.min)) throw ValidationError("label fit set is constant; cannot scale");
  ScaledLabels out{{}, rec};
  out.scaled.reserve(values.size());
  for (Real y : values) out.scaled.push_back(rec.scale(y));
  return out;
}

// Generator -----------------------------------------------------------------

namespace {

template <typename T>
void check_range(const std::pair<T, T>& r, const char* name, bool positive = true) {
  if (r.first > r.second || (positive && !(r.first > 0))) {
    throw ValidationError(std::string("invalid range for ") + name);
  }
}

struct WheelLayout {
  std::vector<Real> ring_radius;  // ring boundaries, inner to outer
  int hub_rings = 0;
  int spoke_rings = 0;
  int segments = 0;
  std::vector<bool> spoke_segment;
  Real disk_half = 0;
  Real rim_half = 0;
  std::vector<Real> rim_levels;  // z levels carried by rim cells, ascending

  // Half-height of cell (ring, segment); 0 when empty.
  Real half_height(int ring, int segment) const {
    const int rings = static_cast<int>(ring_radius.size()) - 1;
    if (ring < 0 || ring >= rings) return 0;
    segment = ((segment % segments) + segments) % segments;
    if (ring < hub_rings) return disk_half;
    if (ring < hub_rings + spoke_rings) return spoke_segment[segment] ? disk_half : 0;
    return rim_half;
  }
};

WheelLayout layout_for(const ShapeParams& p, int resolution) {
  WheelLayout w;
  w.segments = resolution;
  w.hub_rings = 2;
  w.spoke_rings = 3;
  const Real r0 = p.bore_radius(), r1 = p.hub_radius, r2 = p.rim_inner_radius(),
             r3 = p.outer_radius;
  for (int i = 0; i < w.hub_rings; ++i) w.ring_radius.push_back(r0 + (r1 - r0) * i / w.hub_rings);
  for (int i = 0; i < w.spoke_rings; ++i) {
    w.ring_radius.push_back(r1 + (r2 - r1) * i / w.spoke_rings);
  }
  w.ring_radius.push_back(r2);
  w.ring_radius.push_back(r3);

  // Spokes are straight in angle, sized by their width at the mid radius.
  const Real mid = 0.5 * (r1 + r2);
  const Real half_angle = 0.5 * p.spoke_width / mid;
  const Real seg_angle = 2.0 * std::numbers::pi / resolution;
  w.spoke_segment.assign(resolution, false);
  for (int s = 0; s < resolution; ++s) {
    const Real centre = (s + 0.5) * seg_angle;
    for (int k = 0; k < p.spoke_count; ++k) {
      const Real axis = 2.0 * std::numbers::pi * k / p.spoke_count;
      Real d = std::fabs(std::remainder(centre - axis, 2.0 * std::numbers::pi));
      if (d <= std::max(half_angle, 0.5 * seg_angle)) w.spoke_segment[s] = true;
    }
  }
  w.disk_half = 0.5 * p.disk_thickness;
  w.rim_half = 0.5 * p.rim_width;

  // Intermediate rim levels keep the tall rim walls from becoming slivers.
  const Real arc = seg_angle * r3;
  const int m = std::max(1, static_cast<int>(std::ceil(w.rim_half / arc)));
  for (int j = -m; j <= m; ++j) {
    const Real z = j == -m ? -w.rim_half : j == m ? w.rim_half : w.rim_half * j / m;
    if (j != -m && j != m && std::fabs(std::fabs(z) - w.disk_half) < 0.25 * w.rim_half / m) continue;
    w.rim_levels.push_back(z);
  }
  return w;
}

// Spoke runs and window runs around the ring, each as a count of segments.
void check_spoke_pattern(const WheelLayout& w, int spoke_count) {
  int transitions = 0;
  for (int s = 0; s < w.segments; ++s) {
    if (w.spoke_segment[s] != w.spoke_segment[(s + 1) % w.segments]) ++transitions;
  }
  if (transitions != 2 * spoke_count) {
    throw ValidationError("spokes overlap or vanish at this resolution");
  }
}

class WheelBuilder {
 public:
  explicit WheelBuilder(const WheelLayout& w) : w_(w) {}

  TriMesh build() {
    const int rings = static_cast<int>(w_.ring_radius.size()) - 1;
    for (int i = 0; i < rings; ++i) {
      for (int s = 0; s < w_.segments; ++s) {
        const Real h = w_.half_height(i, s);
        if (h == 0) continue;
        // Caps: +z on top, -z on the bottom.
        quad(vertex(i, s, h), vertex(i + 1, s, h), vertex(i + 1, s + 1, h), vertex(i, s + 1, h));
        quad(vertex(i, s, -h), vertex(i, s + 1, -h), vertex(i + 1, s + 1, -h),
             vertex(i + 1, s, -h));
      }
    }
    // Cylindrical walls at ring boundary i, between rings i-1 and i.
    for (int i = 0; i <= rings; ++i) {
      for (int s = 0; s < w_.segments; ++s) {
        const Real inner = w_.half_height(i - 1, s), outer = w_.half_height(i, s);
        if (inner == outer) continue;
        const Real mid_angle = (s + 0.5) * seg_angle();
        const Vec3 radial(std::cos(mid_angle), std::sin(mid_angle), 0);
        const Vec3 normal = inner > outer ? radial : Vec3(-radial);
        wall({i, s}, {i, s + 1}, std::min(inner, outer), std::max(inner, outer), normal);
      }
    }
    // Planar walls at segment boundary s, between segments s-1 and s.
    for (int i = 0; i < rings; ++i) {
      for (int s = 0; s < w_.segments; ++s) {
        const Real before = w_.half_height(i, s - 1), after = w_.half_height(i, s);
        if (before == after) continue;
        const Real angle = s * seg_angle();
        const Vec3 tangent(-std::sin(angle), std::cos(angle), 0);
        const Vec3 normal = before > after ? tangent : Vec3(-tangent);
        wall({i, s}, {i + 1, s}, std::min(before, after), std::max(before, after), normal);
      }
    }
    return std::move(mesh_);
  }

 private:
  struct Column {
    int ring, segment;
  };

  Real seg_angle() const { return 2.0 * std::numbers::pi / w_.segments; }

  int vertex(int ring, int segment, Real z) {
    segment = ((segment % w_.segments) + w_.segments) % w_.segments;
    const auto key = std::make_tuple(ring, segment, z);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const Real r = w_.ring_radius[ring];
    const Real a = segment * seg_angle();
    const int idx = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.emplace_back(r * std::cos(a), r * std::sin(a), z);
    index_.emplace(key, idx);
    return idx;
  }

  void quad(int a, int b, int c, int d) {
    mesh_.faces.push_back({a, b, c});
    mesh_.faces.push_back({a, c, d});
  }

  // z levels present on the vertical line at a grid point.
  std::vector<Real> levels(const Column& c) const {
    std::vector<Real> out;
    for (int ring : {c.ring - 1, c.ring}) {
      for (int seg : {c.segment - 1, c.segment}) {
        const Real h = w_.half_height(ring, seg);
        if (h == 0) continue;
        if (h == w_.rim_half) {
          out.insert(out.end(), w_.rim_levels.begin(), w_.rim_levels.end());
        } else {
          out.push_back(-h);
          out.push_back(h);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Vertical wall between columns a and b over |z| in [lo, hi] (lo = 0 means
  // one continuous band), zipped so both columns keep all their levels.
  void wall(Column a, Column b, Real lo, Real hi, const Vec3& normal) {
    const auto la = levels(a), lb = levels(b);
    auto band = [&](Real z0, Real z1) {
      std::vector<Real> za, zb;
      for (Real z : la) {
        if (z >= z0 && z <= z1) za.push_back(z);
      }
      for (Real z : lb) {
        if (z >= z0 && z <= z1) zb.push_back(z);
      }
      std::size_t i = 0, j = 0;
      while (i + 1 < za.size() || j + 1 < zb.size()) {
        const bool advance_a =
            j + 1 >= zb.size() || (i + 1 < za.size() && za[i + 1] <= zb[j + 1]);
        int p = vertex(a.ring, a.segment, za[i]);
        int q = vertex(b.ring, b.segment, zb[j]);
        int r = advance_a ? vertex(a.ring, a.segment, za[i + 1])
                          : vertex(b.ring, b.segment, zb[j + 1]);
        if (advance_a) {
          ++i;
        } else {
          ++j;
        }
        oriented(p, q, r, normal);
      }
    };
    if (lo == 0) {
      band(-hi, hi);
    } else {
      band(lo, hi);
      band(-hi, -lo);
    }
  }

  void oriented(int p, int q, int r, const Vec3& normal) {
    const Vec3 n = (mesh_.vertices[q] - mesh_.vertices[p]).cross(mesh_.vertices[r] - mesh_.vertices[p]);
    if (n.dot(normal) < 0) std::swap(q, r);
    mesh_.faces.push_back({p, q, r});
  }

  const WheelLayout& w_;
  TriMesh mesh_;
  std::map<std::tuple<int, int, Real>, int> index_;
};

}  // namespace

void validate(const ShapeRanges& r) {
  check_range(r.outer_radius, "outer_radius");
  check_range(r.rim_width, "rim_width");
  check_range(r.hub_radius, "hub_radius");
  check_range(r.disk_thickness, "disk_thickness");
  check_range(r.spoke_width, "spoke_width");
  check_range(r.density, "density");
  if (r.spoke_count.first < 3 || r.spoke_count.first > r.spoke_count.second) {
    throw ValidationError("invalid range for spoke_count (minimum 3)");
  }
}

ShapeParams sample_shape(const ShapeRanges& r, Rng& rng) {
  ShapeParams p;
  p.outer_radius = uniform_real(rng, r.outer_radius.first, r.outer_radius.second);
  p.rim_width = uniform_real(rng, r.rim_width.first, r.rim_width.second);
  p.hub_radius = uniform_real(rng, r.hub_radius.first, r.hub_radius.second);
  p.disk_thickness = uniform_real(rng, r.disk_thickness.first, r.disk_thickness.second);
  p.spoke_count =
      static_cast<int>(uniform_int(rng, r.spoke_count.first, r.spoke_count.second));
  p.spoke_width = uniform_real(rng, r.spoke_width.first, r.spoke_width.second);
  p.density = uniform_real(rng, r.density.first, r.density.second);
  return p;
}

void validate(const ShapeParams& p, int resolution) {
  if (!(p.outer_radius > 0 && p.rim_width > 0 && p.hub_radius > 0 && p.disk_thickness > 0 &&
        p.spoke_width > 0 && p.density > 0)) {
    throw ValidationError("shape dimensions and density must be positive");
  }
  if (p.spoke_count < 3) throw ValidationError("spoke count must be at least 3");
  if (!(p.hub_radius < p.outer_radius)) throw ValidationError("hub radius must be below outer radius");
  if (!(p.hub_radius < 0.8 * p.rim_inner_radius())) {
    throw ValidationError("hub overlaps the rim");
  }
  if (!(p.disk_thickness < p.rim_width)) {
    throw ValidationError("disk thickness must be below rim width");
  }
  if (resolution < 2 * p.spoke_count || resolution < 12) {
    throw ValidationError("resolution too low for the spoke count");
  }
  check_spoke_pattern(layout_for(p, resolution), p.spoke_count);
}

TriMesh generate_shape(const ShapeParams& params, int resolution) {
  validate(params, resolution);
  const WheelLayout layout = layout_for(params, resolution);
  TriMesh mesh = WheelBuilder(layout).build();
  validate(mesh);
  return mesh;
}

Real signed_volume(const TriMesh& mesh) {
  Real v = 0;
  for (const Face& t : mesh.faces) {
    v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  return v / 6.0;
}

Eigen::Matrix3d second_moment(const TriMesh& mesh, Real density) {
  // Each face spans a tetrahedron with the origin; for corners a, b, c the
  // integral of x x^T is V/20 (a a^T + b b^T + c c^T + s s^T), s = a + b + c.
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (const Face& t : mesh.faces) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Real vol = a.dot(b.cross(c)) / 6.0;
    const Vec3 s = a + b + c;
    acc += vol / 20.0 * (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose());
  }
  return density * acc;
}

Real OracleLabels::get(Performance p) const {
  switch (p) {
    case Performance::Mass:
      return mass;
    case Performance::RimStiffness:
      return rim_proxy;
    case Performance::DiskStiffness:
      return disk_proxy;
  }
  return 0;
}

OracleLabels oracle_labels(const TriMesh& mesh, Real density) {
  if (!is_closed_manifold(mesh)) {
    throw ValidationError("label oracle needs a closed mesh (signed volume unreliable)");
  }
  const Real volume = signed_volume(mesh);
  if (!(volume > 0)) throw ValidationError("mesh is inside out (negative signed volume)");
  const Eigen::Matrix3d m2 = second_moment(mesh, density);
  OracleLabels out;
  out.mass = density * volume;
  out.rim_proxy = m2(0, 0) + m2(1, 1);
  out.disk_proxy = m2(1, 1) + m2(2, 2);
  return out;
}

}  // namespace meshgnn
