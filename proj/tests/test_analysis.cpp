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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "meshgnn/analysis.hpp"
#include "meshgnn/pipeline.hpp"

namespace meshgnn {
namespace {

Real direct_pearson(const std::vector<Real>& x, const std::vector<Real>& y) {
  const std::size_t m = x.size();
  Real mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  Real num = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    sx += (x[i] - mx) * (x[i] - mx);
    sy += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(sx * sy);
}

std::vector<Real> normal_vector(int n, Rng& rng) {
  std::vector<Real> v(n);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

TEST(Pearson, AffineIdentities) {
  const std::vector<Real> x = {1, 2, 4, 7, 11};
  std::vector<Real> up, down;
  for (Real v : x) {
    up.push_back(2 * v + 1);
    down.push_back(-v);
  }
  EXPECT_NEAR(pearson(x, up), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, down), -1.0, 1e-15);
}

TEST(Pearson, MatchesDirectFormula) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = normal_vector(50, rng);
    auto y = normal_vector(50, rng);
    for (int i = 0; i < 50; ++i) y[i] += 0.5 * x[i];
    EXPECT_NEAR(pearson(x, y), direct_pearson(x, y), 1e-12);
  }
}

TEST(Pearson, InvariancesAndRange) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = normal_vector(20, rng);
    const auto y = normal_vector(20, rng);
    const Real r = pearson(x, y);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
    std::vector<Real> xa, yn;
    for (Real v : x) xa.push_back(3.5 * v - 2);
    for (Real v : y) yn.push_back(-v);
    EXPECT_NEAR(pearson(xa, y), r, 1e-12);
    EXPECT_NEAR(pearson(x, yn), -r, 1e-12);
  }
}

TEST(Pearson, Errors) {
  EXPECT_THROW(pearson(std::vector<Real>{1, 1, 1}, std::vector<Real>{1, 2, 3}), ValidationError);
  EXPECT_THROW(pearson(std::vector<Real>{1}, std::vector<Real>{2}), ValidationError);
  EXPECT_THROW(pearson(std::vector<Real>{1, 2}, std::vector<Real>{1, 2, 3}), ValidationError);
}

TEST(SampleGridPoints, UniqueInBoundsDeterministic) {
  const SearchBounds b{0, 2, 200, 600};
  const auto pts = sample_grid_points(b, 40, 3);
  std::set<GridPoint> seen(pts.begin(), pts.end());
  EXPECT_EQ(seen.size(), 40u);
  for (auto p : pts) EXPECT_TRUE(b.contains(p));
  EXPECT_EQ(pts, sample_grid_points(b, 40, 3));
  const auto with = sample_grid_points(b, 5, 3, GridPoint{1, 300});
  EXPECT_EQ(with[0], (GridPoint{1, 300}));
  EXPECT_THROW(sample_grid_points({0, 0, 0, 1}, 3, 1), ValidationError);
}

StudySample fake_sample(GridPoint p, std::uint64_t) {
  StudySample s;
  s.q_min = 30 + 0.01 * p.l + p.k;
  s.q_max = 100 - 0.02 * p.l;
  s.r2 = {0.5 + 0.001 * p.l, 0.9 - 0.0005 * p.l, 0.6 + 0.01 * p.k};
  return s;
}

TEST(RunStudy, RowsAndPearsonEntries) {
  const auto pts = sample_grid_points({0, 2, 200, 600}, 12, 5);
  const StudyReport rep = run_study(pts, fake_sample, 5);
  EXPECT_EQ(rep.rows.size(), 12u);
  EXPECT_EQ(rep.requested, 12);
  ASSERT_EQ(rep.pearson.size(), 6u);
  for (const auto& e : rep.pearson) {
    EXPECT_GE(e.r, -1.0);
    EXPECT_LE(e.r, 1.0);
  }
  // q_max is affine-decreasing in l, mass R^2 affine-increasing
  EXPECT_NEAR(rep.pearson[1].r, -1.0, 1e-12);
}

TEST(RunStudy, FailuresExcludedWithWarning) {
  const auto pts = sample_grid_points({0, 2, 200, 600}, 6, 2);
  const GridPoint bad = pts[3];
  const StudyReport rep = run_study(
      pts,
      [&](GridPoint p, std::uint64_t s) {
        if (p == bad) throw Error("training diverged");
        return fake_sample(p, s);
      },
      2);
  EXPECT_EQ(rep.rows.size() + rep.excluded.size(), 6u);
  ASSERT_EQ(rep.excluded.size(), 1u);
  EXPECT_EQ(rep.excluded[0].point, bad);
  ASSERT_EQ(rep.warnings.size(), 1u);
  EXPECT_NE(rep.warnings[0].find("training diverged"), std::string::npos);
}

TEST(RunStudy, IdenticalPointsSurfaceConstantInputError) {
  const std::vector<GridPoint> pts = {{1, 300}, {1, 300}};
  EXPECT_THROW(run_study(pts, fake_sample, 0), ValidationError);
}

TEST(QualityAccuracyStudy, SmallEndToEnd) {
  const LabeledDataset ds = generate_dataset(20, ShapeRanges{}, 24, 4);
  const DatasetSplit split = split_dataset(20, 4);
  StudyConfig cfg;
  cfg.bounds = {0, 0, 60, 120};
  cfg.samples = 3;
  cfg.seed = 4;
  cfg.model.graph_dims = {8, 8, 8};
  cfg.model.dense_dims = {8, 4};
  cfg.train.learning_rate = 1e-3;
  cfg.train.max_epochs = 5;
  cfg.train.patience = 5;
  const StudyReport rep = quality_accuracy_study(ds, split, cfg);
  EXPECT_EQ(rep.rows.size(), 3u);
  for (const auto& w : rep.warnings) ADD_FAILURE() << w;
  for (const auto& s : rep.rows) {
    EXPECT_GT(s.q_min, 0.0);
    EXPECT_LE(s.q_min, 60.0);
    EXPECT_GE(s.q_max, 60.0);
    EXPECT_LT(s.q_max, 180.0);
  }
  const auto dir = std::filesystem::temp_directory_path();
  write_study_csv(rep, dir / "meshgnn_study.csv");
  write_pearson_csv(rep, dir / "meshgnn_pearson.csv");
  std::ifstream in(dir / "meshgnn_study.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,l,q_min,q_max,r2_mass,r2_rim,r2_disk");
  std::filesystem::remove(dir / "meshgnn_study.csv");
  std::filesystem::remove(dir / "meshgnn_pearson.csv");
}

}  // namespace
}  // namespace meshgnn
