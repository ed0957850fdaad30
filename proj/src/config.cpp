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

#include "meshgnn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace meshgnn {

using nlohmann::json;

namespace {

// Reads members of one JSON object; anything left unread is an error.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(where() + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    try {
      if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ValidationError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_unsigned()) {
            out = it->template get<T>();
          } else {
            auto v = it->template get<std::int64_t>();
            if (v < 0) throw ValidationError("");
            out = static_cast<T>(v);
          }
        } else {
          out = it->template get<T>();
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ValidationError("");
        out = it->template get<T>();
      } else {
        out = it->template get<T>();
      }
    } catch (const std::exception&) {
      throw ValidationError(where() + "." + key + " has the wrong type");
    }
  }

  template <class T>
  void read_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) {
      out.reset();
      return;
    }
    T v{};
    read(key, v);
    out = v;
  }

  void read_range(const char* key, std::pair<Real, Real>& out) {
    std::vector<Real> v{out.first, out.second};
    read(key, v);
    if (v.size() != 2) throw ValidationError(where() + "." + key + " must be [lo, hi]");
    out = {v[0], v[1]};
  }

  void read_range(const char* key, std::pair<int, int>& out) {
    std::vector<int> v{out.first, out.second};
    read(key, v);
    if (v.size() != 2) throw ValidationError(where() + "." + key + " must be [lo, hi]");
    out = {v[0], v[1]};
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    return Section(*it, path_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) throw ValidationError("unknown key " + where() + "." + k);
    }
  }

 private:
  std::string where() const { return path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

void RunConfig::validate() const {
  require(schema_version == kConfigSchemaVersion,
          "unsupported schema_version " + std::to_string(schema_version));
  require(dataset.count >= 3, "dataset.count must be at least 3");
  require(dataset.resolution >= 8, "dataset.resolution must be at least 8");
  meshgnn::validate(dataset.ranges);
  require(mesh.k >= 0 && mesh.l >= 1, "mesh.k must be >= 0 and mesh.l >= 1");
  require(max_faces > 0, "max_faces must be positive");
  bounds.validate();
  require(bounds.k_min >= 0 && bounds.l_min >= 1, "bounds must have k >= 0 and l >= 1");
  model.validate();
  train.validate();
  require(optimize.strategy == "bo-ei" || optimize.strategy == "bo-ucb" ||
              optimize.strategy == "mcmc",
          "optimize.strategy must be bo-ei, bo-ucb or mcmc");
  require(optimize.objective == "surrogate" || optimize.objective == "toy",
          "optimize.objective must be surrogate or toy");
  require(optimize.t_max >= 1, "optimize.t_max must be >= 1");
  require(optimize.p_max >= 1, "optimize.p_max must be >= 1");
  require(std::isfinite(optimize.noise) && optimize.noise >= 0, "optimize.noise must be >= 0");
  require(std::isfinite(optimize.kappa) && optimize.kappa >= 0, "optimize.kappa must be >= 0");
  require(optimize.compare_budget >= 1, "optimize.compare_budget must be >= 1");
  if (mcmc.temperature)
    require(std::isfinite(*mcmc.temperature) && *mcmc.temperature > 0,
            "mcmc.temperature must be positive");
  if (mcmc.sigma_l)
    require(std::isfinite(*mcmc.sigma_l) && *mcmc.sigma_l > 0, "mcmc.sigma_l must be positive");
  require(mcmc.k_step_probability >= 0 && mcmc.k_step_probability <= 1,
          "mcmc.k_step_probability must be in [0, 1]");
  require(mcmc.evaluations >= 1, "mcmc.evaluations must be >= 1");
  require(mcmc.repeats >= 1, "mcmc.repeats must be >= 1");
  require(study.samples >= 2, "study.samples must be >= 2");
  if (study.include)
    require(bounds.contains(*study.include), "study.include must lie inside bounds");
}

json to_json(const RunConfig& c) {
  const auto& r = c.dataset.ranges;
  auto pr = [](auto p) { return json::array({p.first, p.second}); };
  json study = {{"samples", c.study.samples}, {"include", nullptr}};
  if (c.study.include) study["include"] = {c.study.include->k, c.study.include->l};
  return {
      {"schema_version", c.schema_version},
      {"seed", c.seed},
      {"dataset",
       {{"dir", c.dataset.dir},
        {"count", c.dataset.count},
        {"resolution", c.dataset.resolution},
        {"ranges",
         {{"outer_radius", pr(r.outer_radius)},
          {"rim_width", pr(r.rim_width)},
          {"hub_radius", pr(r.hub_radius)},
          {"disk_thickness", pr(r.disk_thickness)},
          {"spoke_count", pr(r.spoke_count)},
          {"spoke_width", pr(r.spoke_width)},
          {"density", pr(r.density)}}}}},
      {"performance", to_string(c.performance)},
      {"mesh", {{"k", c.mesh.k}, {"l", c.mesh.l}}},
      {"max_faces", c.max_faces},
      {"bounds",
       {{"k_min", c.bounds.k_min},
        {"k_max", c.bounds.k_max},
        {"l_min", c.bounds.l_min},
        {"l_max", c.bounds.l_max}}},
      {"model",
       {{"input_dim", c.model.input_dim},
        {"graph_dims", c.model.graph_dims},
        {"dense_dims", c.model.dense_dims}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"batch_size", c.train.batch_size},
        {"max_epochs", c.train.max_epochs},
        {"patience", c.train.patience},
        {"adjacency", to_string(c.train.policy)}}},
      {"optimize",
       {{"strategy", c.optimize.strategy},
        {"objective", c.optimize.objective},
        {"t_max", c.optimize.t_max},
        {"p_max", c.optimize.p_max},
        {"noise", c.optimize.noise},
        {"kappa", c.optimize.kappa},
        {"compare_seeds", c.optimize.compare_seeds},
        {"compare_budget", c.optimize.compare_budget}}},
      {"mcmc",
       {{"temperature", c.mcmc.temperature ? json(*c.mcmc.temperature) : json(nullptr)},
        {"sigma_l", c.mcmc.sigma_l ? json(*c.mcmc.sigma_l) : json(nullptr)},
        {"k_step_probability", c.mcmc.k_step_probability},
        {"evaluations", c.mcmc.evaluations},
        {"repeats", c.mcmc.repeats}}},
      {"study", study},
      {"report", {{"inputs", c.report_inputs}}},
  };
}

RunConfig config_from_json(const json& doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("subcommand")) {
    return config_from_json(doc.at("config"));
  }
  RunConfig c;
  Section root(doc, "config");
  root.read("schema_version", c.schema_version);
  require(c.schema_version == kConfigSchemaVersion,
          "unsupported schema_version " + std::to_string(c.schema_version));
  root.read("seed", c.seed);
  if (auto s = root.child("dataset")) {
    s->read("dir", c.dataset.dir);
    s->read("count", c.dataset.count);
    s->read("resolution", c.dataset.resolution);
    if (auto r = s->child("ranges")) {
      auto& g = c.dataset.ranges;
      r->read_range("outer_radius", g.outer_radius);
      r->read_range("rim_width", g.rim_width);
      r->read_range("hub_radius", g.hub_radius);
      r->read_range("disk_thickness", g.disk_thickness);
      r->read_range("spoke_count", g.spoke_count);
      r->read_range("spoke_width", g.spoke_width);
      r->read_range("density", g.density);
      r->finish();
    }
    s->finish();
  }
  std::string perf = to_string(c.performance);
  root.read("performance", perf);
  c.performance = performance_from_string(perf);
  if (auto s = root.child("mesh")) {
    s->read("k", c.mesh.k);
    s->read("l", c.mesh.l);
    s->finish();
  }
  root.read("max_faces", c.max_faces);
  if (auto s = root.child("bounds")) {
    s->read("k_min", c.bounds.k_min);
    s->read("k_max", c.bounds.k_max);
    s->read("l_min", c.bounds.l_min);
    s->read("l_max", c.bounds.l_max);
    s->finish();
  }
  if (auto s = root.child("model")) {
    s->read("input_dim", c.model.input_dim);
    s->read("graph_dims", c.model.graph_dims);
    s->read("dense_dims", c.model.dense_dims);
    s->finish();
  }
  if (auto s = root.child("train")) {
    s->read("learning_rate", c.train.learning_rate);
    s->read("batch_size", c.train.batch_size);
    s->read("max_epochs", c.train.max_epochs);
    s->read("patience", c.train.patience);
    std::string pol = to_string(c.train.policy);
    s->read("adjacency", pol);
    c.train.policy = adjacency_policy_from_string(pol);
    s->finish();
  }
  if (auto s = root.child("optimize")) {
    s->read("strategy", c.optimize.strategy);
    s->read("objective", c.optimize.objective);
    s->read("t_max", c.optimize.t_max);
    s->read("p_max", c.optimize.p_max);
    s->read("noise", c.optimize.noise);
    s->read("kappa", c.optimize.kappa);
    s->read("compare_seeds", c.optimize.compare_seeds);
    s->read("compare_budget", c.optimize.compare_budget);
    s->finish();
  }
  if (auto s = root.child("mcmc")) {
    s->read_optional("temperature", c.mcmc.temperature);
    s->read_optional("sigma_l", c.mcmc.sigma_l);
    s->read("k_step_probability", c.mcmc.k_step_probability);
    s->read("evaluations", c.mcmc.evaluations);
    s->read("repeats", c.mcmc.repeats);
    s->finish();
  }
  if (auto s = root.child("study")) {
    s->read("samples", c.study.samples);
    std::optional<std::vector<int>> inc;
    s->read_optional("include", inc);
    if (inc) {
      require(inc->size() == 2, "config.study.include must be [k, l]");
      c.study.include = GridPoint{(*inc)[0], (*inc)[1]};
    }
    s->finish();
  }
  if (auto s = root.child("report")) {
    s->read("inputs", c.report_inputs);
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

Real toy_objective(const SearchBounds& b, GridPoint p) {
  const Real kc = 0.5 * (b.k_min + b.k_max);
  const Real lc = 0.5 * (b.l_min + b.l_max);
  const Real ls = b.l_max > b.l_min ? 0.25 * (b.l_max - b.l_min) : 1.0;
  const Real dk = p.k - kc;
  const Real dl = (p.l - lc) / ls;
  return dk * dk + dl * dl;
}

}  // namespace meshgnn
