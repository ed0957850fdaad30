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

#include "meshgnn/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>

#include "meshgnn/pipeline.hpp"

namespace meshgnn {

std::vector<GridPoint> sample_grid_points(const SearchBounds& bounds, int count,
                                          std::uint64_t seed, std::optional<GridPoint> include) {
  bounds.validate();
  if (count < 1) throw ValidationError("sample count must be at least 1");
  if (count > bounds.grid_size()) throw ValidationError("more samples than grid points");
  Rng rng(derive_seed(seed, "study-points"));
  std::set<GridPoint> seen;
  std::vector<GridPoint> out;
  if (include && bounds.contains(*include)) {
    out.push_back(*include);
    seen.insert(*include);
  }
  while (static_cast<int>(out.size()) < count) {
    const GridPoint p{static_cast<int>(uniform_int(rng, bounds.k_min, bounds.k_max)),
                      static_cast<int>(uniform_int(rng, bounds.l_min, bounds.l_max))};
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

StudyReport run_study(const std::vector<GridPoint>& points, const SampleEvaluator& evaluate,
                      std::uint64_t seed) {
  if (points.size() < 2) throw ValidationError("a study needs at least two samples");
  StudyReport rep;
  rep.requested = static_cast<int>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      StudySample s = evaluate(points[i], derive_seed(seed, "study-sample", i));
      s.point = points[i];
      bool finite = std::isfinite(s.q_min) && std::isfinite(s.q_max);
      for (Real r : s.r2) finite = finite && std::isfinite(r);
      if (!finite) throw Error("non-finite quality or R^2");
      rep.rows.push_back(s);
    } catch (const std::exception& e) {
      rep.excluded.push_back({points[i], e.what()});
      rep.warnings.push_back("sample (" + std::to_string(points[i].k) + ", " +
                             std::to_string(points[i].l) + ") excluded: " + e.what());
    }
  }
  std::vector<Real> qmin, qmax;
  for (const auto& s : rep.rows) {
    qmin.push_back(s.q_min);
    qmax.push_back(s.q_max);
  }
  for (std::size_t p = 0; p < std::size(kAllPerformances); ++p) {
    std::vector<Real> r2;
    for (const auto& s : rep.rows) r2.push_back(s.r2[p]);
    rep.pearson.push_back({kAllPerformances[p], "q_min", pearson(qmin, r2)});
    rep.pearson.push_back({kAllPerformances[p], "q_max", pearson(qmax, r2)});
  }
  return rep;
}

StudyReport quality_accuracy_study(const LabeledDataset& data, const DatasetSplit& split,
                                   const StudyConfig& config) {
  const auto points =
      sample_grid_points(config.bounds, config.samples, config.seed, config.include);
  return run_study(
      points,
      [&](GridPoint p, std::uint64_t sample_seed) {
        const auto meshes = remesh_dataset(data.meshes, {p.k, p.l}, sample_seed, config.max_faces);
        const QualityReport q = quality_report(meshes);
        const auto graphs = graphs_of(meshes);
        StudySample s;
        s.q_min = q.q_min;
        s.q_max = q.q_max;
        for (std::size_t i = 0; i < std::size(kAllPerformances); ++i) {
          TrainConfig tc = config.train;
          tc.seed = derive_seed(sample_seed, "train", i);
          s.r2[i] = run_experiment(graphs, data.values(kAllPerformances[i]), kAllPerformances[i],
                                   split, config.model, tc)
                        .test.r2;
        }
        return s;
      },
      config.seed);
}

namespace {

std::string fmt(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_study_csv(const StudyReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "k,l,q_min,q_max,r2_mass,r2_rim,r2_disk\n";
  for (const auto& s : report.rows) {
    out << s.point.k << "," << s.point.l << "," << fmt(s.q_min) << "," << fmt(s.q_max) << ","
        << fmt(s.r2[0]) << "," << fmt(s.r2[1]) << "," << fmt(s.r2[2]) << "\n";
  }
}

void write_pearson_csv(const StudyReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "performance,quality,r,samples\n";
  for (const auto& e : report.pearson) {
    out << to_string(e.performance) << "," << e.quality << "," << fmt(e.r) << ","
        << report.rows.size() << "\n";
  }
}

}  // namespace meshgnn
