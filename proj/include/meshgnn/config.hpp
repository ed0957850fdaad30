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

#ifndef MESHGNN_CONFIG_HPP
#define MESHGNN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meshgnn/analysis.hpp"
#include "meshgnn/labels.hpp"
#include "meshgnn/mesh.hpp"
#include "meshgnn/nn.hpp"
#include "meshgnn/optimizer.hpp"

namespace meshgnn {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kSoftwareVersion = "0.1.0";

struct DatasetConfig {
  std::string dir;  // gen-data output; empty: generate in memory
  int count = 925;
  int resolution = 48;
  ShapeRanges ranges;
};

struct OptimizeConfig {
  std::string strategy = "bo-ei";  // bo-ei | bo-ucb | mcmc
  std::string objective = "surrogate";  // surrogate | toy
  int t_max = 20;
  int p_max = 5;
  Real noise = 1e-6;
  Real kappa = 2.0;
  std::vector<std::uint64_t> compare_seeds;  // non-empty: also run the comparison
  int compare_budget = 25;
};

struct McmcSettings {
  std::optional<Real> temperature;
  std::optional<Real> sigma_l;
  Real k_step_probability = 0.3;
  int evaluations = 20;
  int repeats = 10;
};

struct StudySettings {
  int samples = 50;
  std::optional<GridPoint> include;
};

/// Everything a subcommand needs. Defaults are the published settings where
/// there is one.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  DatasetConfig dataset;
  Performance performance = Performance::Mass;
  MeshSizeParams mesh{3, 4557};
  std::size_t max_faces = kDefaultMaxFaces;
  SearchBounds bounds{2, 4, 3000, 5000};
  ModelConfig model;
  TrainConfig train;
  OptimizeConfig optimize;
  McmcSettings mcmc;
  StudySettings study;
  std::vector<std::string> report_inputs;  // empty: the output directory itself

  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);

/// Strict: unknown keys and wrong types are ValidationErrors. Accepts a run
/// manifest as well, reading its "config" member.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Objective used by `optimize --objective toy`: a convex bowl centred in the
/// bounds, scaled so the l axis spans about +-2.
Real toy_objective(const SearchBounds& bounds, GridPoint p);

}  // namespace meshgnn

#endif  // MESHGNN_CONFIG_HPP
