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

#ifndef MESHGNN_LABELS_HPP
#define MESHGNN_LABELS_HPP

#include <string>
#include <utility>
#include <vector>

#include "meshgnn/mesh.hpp"

namespace meshgnn {

enum class Performance { Mass, RimStiffness, DiskStiffness };

inline constexpr Performance kAllPerformances[] = {Performance::Mass, Performance::RimStiffness,
                                                  Performance::DiskStiffness};

std::string to_string(Performance p);
Performance performance_from_string(const std::string& name);

/// Quantities read off a modal / frequency-response analysis.
struct ModalInputs {
  Real mass = 0;                     // kg
  Real natural_frequency = 0;        // Hz
  Real resonance_frequency = 0;      // Hz
  Real antiresonance_frequency = 0;  // Hz
};

/// (2 pi f)^2 m
Real rim_stiffness(Real mass, Real frequency);

/// (2 pi f2)^2 m (1 - f2^2 / f1^2); requires f1 > f2 > 0.
Real disk_stiffness(Real mass, Real resonance, Real antiresonance);

/// Affine map of a population onto [0, 1] using fit-set extrema.
struct MinMaxScaler {
  Real min = 0;
  Real max = 1;

  Real scale(Real y) const { return (y - min) / (max - min); }
  Real inverse(Real s) const { return min + s * (max - min); }
};

struct ScaledLabels {
  std::vector<Real> scaled;
  MinMaxScaler record;
};

/// Fits extrema on `fit_indices` and scales every value. Throws when the fit
/// set is constant.
ScaledLabels scale_labels(const std::vector<Real>& values, const std::vector<int>& fit_indices);

struct PerformanceLabel {
  Performance kind = Performance::Mass;
  Real value = 0;
  Real scaled = 0;
};

// Synthetic wheel generator ---------------------------------------------------

/// Parametric wheel: annular rim, hub disk with a centre bore, radial spokes.
/// Lengths in metres, density in kg/m^3. The wheel axis is z.
struct ShapeParams {
  Real outer_radius = 0.22;
  Real rim_width = 0.18;       // axial extent of the rim
  Real hub_radius = 0.065;
  Real disk_thickness = 0.025;
  int spoke_count = 5;
  Real spoke_width = 0.035;
  Real density = 2700.0;

  // Derived proportions of the generator.
  Real bore_radius() const { return 0.4 * hub_radius; }
  Real rim_inner_radius() const { return 0.94 * outer_radius; }
};

/// Inclusive sampling ranges for dataset generation.
struct ShapeRanges {
  std::pair<Real, Real> outer_radius{0.18, 0.26};
  std::pair<Real, Real> rim_width{0.12, 0.25};
  std::pair<Real, Real> hub_radius{0.05, 0.08};
  std::pair<Real, Real> disk_thickness{0.015, 0.04};
  std::pair<int, int> spoke_count{3, 7};
  std::pair<Real, Real> spoke_width{0.02, 0.05};
  std::pair<Real, Real> density{2650.0, 2750.0};
};

void validate(const ShapeRanges& ranges);
ShapeParams sample_shape(const ShapeRanges& ranges, Rng& rng);

/// Throws ValidationError for parameter sets the generator cannot realise at
/// this resolution (overlapping radii, spokes that fill the disk, ...).
void validate(const ShapeParams& params, int resolution);

/// Closed, consistently oriented wheel surface. Genus is spoke_count + 1.
TriMesh generate_shape(const ShapeParams& params, int resolution);

inline int wheel_genus(const ShapeParams& params) { return params.spoke_count + 1; }

// Geometric label oracles ---------------------------------------------------

/// Divergence-theorem volume; positive for outward-oriented closed meshes.
Real signed_volume(const TriMesh& mesh);

/// Density-weighted second-moment tensor integral of x x^T over the solid.
Eigen::Matrix3d second_moment(const TriMesh& mesh, Real density);

struct OracleLabels {
  Real mass = 0;
  Real rim_proxy = 0;   // polar second moment about the wheel (z) axis
  Real disk_proxy = 0;  // second moment about the diametral x axis

  Real get(Performance p) const;
};

/// Geometric stand-ins for the CAE labels. Rejects open or inside-out meshes.
OracleLabels oracle_labels(const TriMesh& mesh, Real density);

}  // namespace meshgnn

#endif  // MESHGNN_LABELS_HPP
