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

#include "meshgnn/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "meshgnn/analysis.hpp"
#include "meshgnn/config.hpp"
#include "meshgnn/pipeline.hpp"

namespace meshgnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void log(const std::string& msg) { std::cerr << "meshgnn: " << msg << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + " is not valid JSON: " + e.what());
  }
}

// One invocation's output directory: lock, registered outputs, manifest.
class RunDir {
 public:
  RunDir(fs::path root, std::string subcommand)
      : root_(std::move(root)), subcommand_(std::move(subcommand)), started_(utc_now()) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw ValidationError("cannot create output directory " + root_.string());
    lock_ = root_ / ".lock";
    const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw ValidationError("output directory " + root_.string() +
                            " is locked by another run (remove " + lock_.string() +
                            " if that run is gone)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }

  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;

  ~RunDir() {
    std::error_code ec;
    fs::remove(lock_, ec);
  }

  const fs::path& root() const { return root_; }

  /// Registers an output file or directory and returns its path.
  fs::path output(const std::string& name) {
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end())
      outputs_.push_back(name);
    return root_ / name;
  }

  void stage(const std::string& name, double seconds) { stages_[name] += seconds; }
  void warn(const std::string& w) {
    log("warning: " + w);
    warnings_.push_back(w);
  }

  json manifest(const json& config, std::uint64_t seed, const std::string& status) const {
    json stages = json::object();
    for (const auto& [k, v] : stages_) stages[k] = v;
    return {{"subcommand", subcommand_},
            {"status", status},
            {"software_version", kSoftwareVersion},
            {"seed", seed},
            {"started_utc", started_},
            {"finished_utc", utc_now()},
            {"stage_seconds", stages},
            {"outputs", outputs_},
            {"warnings", warnings_},
            {"config", config}};
  }

  void succeed(const json& config, std::uint64_t seed) {
    write_json(root_ / "run_manifest.json", manifest(config, seed, "ok"));
  }

  /// Moves whatever was produced under failed/ next to a diagnostic.
  void fail(const json& config, std::uint64_t seed, int code, const std::string& message) {
    const fs::path dir = root_ / "failed";
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (const auto& name : outputs_) {
      const fs::path src = root_ / name;
      if (!fs::exists(src)) continue;
      const fs::path dst = dir / name;
      fs::remove_all(dst, ec);
      fs::create_directories(dst.parent_path(), ec);
      fs::rename(src, dst, ec);
    }
    json m = manifest(config, seed, "failed");
    m["exit_code"] = code;
    m["error"] = message;
    try {
      write_json(dir / "diagnostic.json", m);
    } catch (const std::exception&) {
    }
  }

 private:
  fs::path root_;
  std::string subcommand_;
  std::string started_;
  fs::path lock_;
  std::vector<std::string> outputs_;
  std::map<std::string, double> stages_;
  std::vector<std::string> warnings_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

struct Context {
  RunConfig config;
  std::uint64_t seed = 0;
  RunDir* run = nullptr;

  std::uint64_t stream(std::string_view stage) const { return derive_seed(seed, stage); }
  TrainConfig train() const {
    TrainConfig t = config.train;
    t.seed = stream("train");
    return t;
  }
};

// Dataset ---------------------------------------------------------------------

json shape_json(const ShapeParams& s) {
  return {{"outer_radius", s.outer_radius}, {"rim_width", s.rim_width},
          {"hub_radius", s.hub_radius},     {"disk_thickness", s.disk_thickness},
          {"spoke_count", s.spoke_count},   {"spoke_width", s.spoke_width},
          {"density", s.density}};
}

ShapeParams shape_from_json(const json& j) {
  ShapeParams s;
  s.outer_radius = j.at("outer_radius").get<Real>();
  s.rim_width = j.at("rim_width").get<Real>();
  s.hub_radius = j.at("hub_radius").get<Real>();
  s.disk_thickness = j.at("disk_thickness").get<Real>();
  s.spoke_count = j.at("spoke_count").get<int>();
  s.spoke_width = j.at("spoke_width").get<Real>();
  s.density = j.at("density").get<Real>();
  return s;
}

// Reads a gen-data directory: dataset.json plus the OBJ files it lists.
LabeledDataset read_dataset_dir(const fs::path& dir) {
  const json doc = read_json(dir / "dataset.json");
  LabeledDataset d;
  try {
    for (const auto& item : doc.at("items")) {
      const fs::path mesh_path = dir / item.at("mesh").get<std::string>();
      std::ifstream in(mesh_path);
      if (!in) throw ValidationError("cannot open mesh " + mesh_path.string());
      std::stringstream ss;
      ss << in.rdbuf();
      TriMesh mesh = parse_obj(ss.str());
      validate(mesh);
      d.names.push_back(item.at("name").get<std::string>());
      d.shapes.push_back(item.contains("shape") ? shape_from_json(item.at("shape"))
                                                : ShapeParams{});
      d.meshes.push_back(std::move(mesh));
      OracleLabels lab;
      lab.mass = item.at("mass").get<Real>();
      lab.rim_proxy = item.at("rim_proxy").get<Real>();
      lab.disk_proxy = item.at("disk_proxy").get<Real>();
      d.labels.push_back(lab);
    }
  } catch (const json::exception& e) {
    throw ValidationError((dir / "dataset.json").string() + ": " + e.what());
  }
  if (d.size() < 3) throw ValidationError("dataset needs at least 3 meshes");
  return d;
}

LabeledDataset load_dataset(const Context& ctx) {
  Stopwatch sw;
  LabeledDataset d;
  if (!ctx.config.dataset.dir.empty()) {
    d = read_dataset_dir(ctx.config.dataset.dir);
    log("loaded " + std::to_string(d.size()) + " meshes from " + ctx.config.dataset.dir);
  } else {
    d = generate_dataset(ctx.config.dataset.count, ctx.config.dataset.ranges,
                         ctx.config.dataset.resolution, ctx.stream("dataset"));
    log("generated " + std::to_string(d.size()) + " meshes");
  }
  ctx.run->stage("dataset", sw.seconds());
  return d;
}

DatasetSplit make_split(const Context& ctx, std::size_t n) {
  return split_dataset(static_cast<int>(n), ctx.stream("split"));
}

json split_json(const DatasetSplit& s) {
  return {{"seed", s.seed}, {"train", s.train}, {"validation", s.validation}, {"test", s.test}};
}

// Outputs ---------------------------------------------------------------------

std::string metrics_csv(Performance p, const ExperimentOutcome& o) {
  std::string s = "performance,split,rmse,mape,r2\n";
  auto row = [&](const char* split, const Metrics& m) {
    s += to_string(p) + "," + split + "," + num(m.rmse) + "," + num(m.mape) + "," + num(m.r2) +
         "\n";
  };
  row("train", o.train);
  row("validation", o.validation);
  row("test", o.test);
  return s;
}

std::string epochs_csv(const TrainedModel& m) {
  std::string s = "epoch,train_loss,val_loss\n";
  for (const auto& e : m.history)
    s += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_loss) + "\n";
  return s;
}

std::string predictions_csv(const LabeledDataset& data, const std::vector<Graph>& graphs,
                            const DatasetSplit& split, const ExperimentOutcome& o) {
  const auto targets = data.values(o.model.performance);
  std::string s = "name,split,target,prediction\n";
  auto block = [&](const char* name, const std::vector<int>& idx) {
    const auto pred = predict(o.model, subset(graphs, idx));
    for (std::size_t i = 0; i < idx.size(); ++i)
      s += data.names[idx[i]] + "," + name + "," + num(targets[idx[i]]) + "," + num(pred[i]) +
           "\n";
  };
  block("train", split.train);
  block("validation", split.validation);
  block("test", split.test);
  return s;
}

// Trains at mesh parameters `mp` and writes checkpoint, metrics and logs.
ExperimentOutcome train_and_write(Context& ctx, const LabeledDataset& data,
                                  const DatasetSplit& split, MeshSizeParams mp) {
  Stopwatch sw;
  const auto meshes = remesh_dataset(data.meshes, mp, ctx.stream("remesh"), ctx.config.max_faces);
  const auto graphs = graphs_of(meshes);
  ctx.run->stage("remesh", sw.seconds());
  Stopwatch tw;
  log("training " + to_string(ctx.config.performance) + " at k=" + std::to_string(mp.k) +
      " l=" + std::to_string(mp.l));
  ExperimentOutcome o = run_experiment(graphs, data.values(ctx.config.performance),
                                       ctx.config.performance, split, ctx.config.model,
                                       ctx.train());
  ctx.run->stage("train", tw.seconds());
  for (const auto& w : o.model.features.warnings) ctx.run->warn(w);
  save_checkpoint(o.model, ctx.run->output("checkpoint.json"));
  write_text(ctx.run->output("metrics.csv"), metrics_csv(ctx.config.performance, o));
  write_text(ctx.run->output("epochs.csv"), epochs_csv(o.model));
  write_text(ctx.run->output("predictions.csv"), predictions_csv(data, graphs, split, o));
  log("test r2 " + num(o.test.r2) + ", rmse " + num(o.test.rmse));
  return o;
}

Objective make_objective(Context& ctx, const LabeledDataset* data, const DatasetSplit& split) {
  if (ctx.config.optimize.objective == "toy") {
    const SearchBounds b = ctx.config.bounds;
    return [b](GridPoint p) { return toy_objective(b, p); };
  }
  SurrogateObjective s;
  s.data = data;
  s.performance = ctx.config.performance;
  s.split = split;
  s.model = ctx.config.model;
  s.train = ctx.train();
  s.seed = ctx.stream("remesh");
  s.max_faces = ctx.config.max_faces;
  return [s](GridPoint p) {
    Stopwatch sw;
    const Real v = s(p);
    log("evaluated k=" + std::to_string(p.k) + " l=" + std::to_string(p.l) + " val mse " +
        num(v) + " (" + num(sw.seconds()) + " s)");
    return v;
  };
}

json best_json(const SearchResult& r) {
  return {{"strategy", r.strategy},
          {"k", r.best.point.k},
          {"l", r.best.point.l},
          {"mse", r.best.mse},
          {"evaluations", r.history.size()}};
}

// Subcommands -----------------------------------------------------------------

void cmd_gen_data(Context& ctx) {
  const LabeledDataset d = load_dataset(ctx);
  Stopwatch sw;
  const fs::path mesh_dir = ctx.run->output("meshes");
  fs::create_directories(mesh_dir);
  json items = json::array();
  std::string csv = "name,mass,rim_proxy,disk_proxy\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string rel = "meshes/" + d.names[i] + ".obj";
    save_obj(d.meshes[i], ctx.run->root() / rel);
    const auto& lab = d.labels[i];
    items.push_back({{"name", d.names[i]},
                     {"mesh", rel},
                     {"mass", lab.mass},
                     {"rim_proxy", lab.rim_proxy},
                     {"disk_proxy", lab.disk_proxy},
                     {"shape", shape_json(d.shapes[i])}});
    csv += d.names[i] + "," + num(lab.mass) + "," + num(lab.rim_proxy) + "," +
           num(lab.disk_proxy) + "\n";
  }
  write_text(ctx.run->output("labels.csv"), csv);
  write_json(ctx.run->output("dataset.json"),
             {{"schema_version", kConfigSchemaVersion},
              {"resolution", ctx.config.dataset.resolution},
              {"units", "m, kg"},
              {"items", items}});
  ctx.run->stage("write", sw.seconds());
}

void cmd_preprocess(Context& ctx) {
  const LabeledDataset d = load_dataset(ctx);
  const DatasetSplit split = make_split(ctx, d.size());
  Stopwatch sw;
  const auto meshes =
      remesh_dataset(d.meshes, ctx.config.mesh, ctx.stream("remesh"), ctx.config.max_faces);
  ctx.run->stage("remesh", sw.seconds());
  const auto graphs = graphs_of(meshes);
  const QualityReport q = quality_report(meshes);
  const ScaledGraphs scaled = scale_node_features(graphs, split.train);
  for (const auto& w : scaled.record.warnings) ctx.run->warn(w);

  const fs::path gdir = ctx.run->output("graphs");
  fs::create_directories(gdir);
  std::string qcsv = "name,vertices,edges,faces,q_min,q_max\n";
  json items = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string rel = "graphs/" + d.names[i] + ".graph";
    save_graph(graphs[i], ctx.run->root() / rel);
    qcsv += d.names[i] + "," + std::to_string(graphs[i].node_count()) + "," +
            std::to_string(graphs[i].edges.size()) + "," +
            std::to_string(meshes[i].face_count()) + "," + num(q.per_mesh_min[i]) + "," +
            num(q.per_mesh_max[i]) + "\n";
    items.push_back({{"name", d.names[i]},
                     {"graph", rel},
                     {"mass", d.labels[i].mass},
                     {"rim_proxy", d.labels[i].rim_proxy},
                     {"disk_proxy", d.labels[i].disk_proxy}});
  }
  write_text(ctx.run->output("quality.csv"), qcsv);
  const auto& f = scaled.record;
  write_json(ctx.run->output("graphs.json"),
             {{"schema_version", kConfigSchemaVersion},
              {"mesh", {{"k", ctx.config.mesh.k}, {"l", ctx.config.mesh.l}}},
              {"q_min", q.q_min},
              {"q_max", q.q_max},
              {"feature_min", {f.min.x(), f.min.y(), f.min.z()}},
              {"feature_max", {f.max.x(), f.max.y(), f.max.z()}},
              {"split", split_json(split)},
              {"items", items}});
  log("q_min " + num(q.q_min) + ", q_max " + num(q.q_max));
}

void cmd_train(Context& ctx) {
  const LabeledDataset d = load_dataset(ctx);
  const DatasetSplit split = make_split(ctx, d.size());
  write_json(ctx.run->output("split.json"), split_json(split));
  train_and_write(ctx, d, split, ctx.config.mesh);
}

void cmd_mcmc_impl(Context& ctx, const Objective& obj) {
  McmcConfig mc;
  mc.bounds = ctx.config.bounds;
  mc.temperature = ctx.config.mcmc.temperature;
  mc.sigma_l = ctx.config.mcmc.sigma_l;
  mc.k_step_probability = ctx.config.mcmc.k_step_probability;
  mc.max_evaluations = ctx.config.mcmc.evaluations;
  mc.seed = ctx.stream("mcmc");
  Stopwatch sw;
  const McmcResult r = mcmc_search(obj, mc);
  ctx.run->stage("search", sw.seconds());
  write_history_csv({r.search}, ctx.run->output("history.csv"));
  std::string chain = "step,k,l,mse,accepted\n";
  for (std::size_t i = 0; i < r.chain.size(); ++i) {
    const auto& c = r.chain[i];
    chain += std::to_string(i) + "," + std::to_string(c.state.k) + "," +
             std::to_string(c.state.l) + "," + num(c.mse) + "," + (c.accepted ? "1" : "0") + "\n";
  }
  write_text(ctx.run->output("chain.csv"), chain);
  json best = best_json(r.search);
  best["temperature"] = r.temperature;
  best["sigma_l"] = r.sigma_l;
  write_json(ctx.run->output("best.json"), best);
  log("best k=" + std::to_string(r.search.best.point.k) +
      " l=" + std::to_string(r.search.best.point.l) + " mse " + num(r.search.best.mse));
}

void cmd_optimize(Context& ctx) {
  const bool toy = ctx.config.optimize.objective == "toy";
  std::optional<LabeledDataset> data;
  DatasetSplit split;
  if (!toy) {
    data = load_dataset(ctx);
    split = make_split(ctx, data->size());
    write_json(ctx.run->output("split.json"), split_json(split));
  }
  const Objective obj = make_objective(ctx, data ? &*data : nullptr, split);
  const auto& oc = ctx.config.optimize;

  if (oc.strategy == "mcmc") {
    cmd_mcmc_impl(ctx, obj);
  } else {
    BoConfig bc;
    bc.bounds = ctx.config.bounds;
    bc.t_max = oc.t_max;
    bc.p_max = oc.p_max;
    bc.acquisition.kind =
        oc.strategy == "bo-ucb" ? Acquisition::Ucb : Acquisition::ExpectedImprovement;
    bc.acquisition.kappa = oc.kappa;
    bc.noise = oc.noise;
    bc.seed = ctx.stream("bo");
    Stopwatch sw;
    const SearchResult r = bo_loop(obj, bc);
    ctx.run->stage("search", sw.seconds());
    write_history_csv({r}, ctx.run->output("history.csv"));
    write_json(ctx.run->output("best.json"), best_json(r));
    log("best k=" + std::to_string(r.best.point.k) + " l=" + std::to_string(r.best.point.l) +
        " mse " + num(r.best.mse) + " after " + std::to_string(r.history.size()) +
        " evaluations");
  }

  if (!oc.compare_seeds.empty()) {
    Stopwatch sw;
    const ComparisonReport cmp =
        compare_strategies(obj, ctx.config.bounds, oc.compare_budget, oc.compare_seeds,
                           ctx.config.mcmc.repeats, oc.noise, oc.kappa);
    ctx.run->stage("compare", sw.seconds());
    write_comparison_csv(cmp, ctx.run->output("comparison.csv"));
    write_history_csv(cmp.runs, ctx.run->output("comparison_history.csv"));
  }

  if (!toy) {
    const json best = read_json(ctx.run->root() / "best.json");
    train_and_write(ctx, *data, split, {best.at("k").get<int>(), best.at("l").get<int>()});
  }
}

void cmd_mcmc(Context& ctx) {
  const bool toy = ctx.config.optimize.objective == "toy";
  std::optional<LabeledDataset> data;
  DatasetSplit split;
  if (!toy) {
    data = load_dataset(ctx);
    split = make_split(ctx, data->size());
  }
  cmd_mcmc_impl(ctx, make_objective(ctx, data ? &*data : nullptr, split));
}

void cmd_study(Context& ctx) {
  const LabeledDataset d = load_dataset(ctx);
  const DatasetSplit split = make_split(ctx, d.size());
  StudyConfig sc;
  sc.bounds = ctx.config.bounds;
  sc.samples = ctx.config.study.samples;
  sc.seed = ctx.stream("study");
  sc.include = ctx.config.study.include;
  sc.model = ctx.config.model;
  sc.train = ctx.train();
  sc.max_faces = ctx.config.max_faces;
  Stopwatch sw;
  const StudyReport r = quality_accuracy_study(d, split, sc);
  ctx.run->stage("study", sw.seconds());
  for (const auto& w : r.warnings) ctx.run->warn(w);
  write_study_csv(r, ctx.run->output("study.csv"));
  write_pearson_csv(r, ctx.run->output("pearson.csv"));
  for (const auto& e : r.pearson)
    log("pearson(" + e.quality + ", r2 " + to_string(e.performance) + ") = " + num(e.r));
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_as_markdown(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, md;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string row = "|";
    std::size_t cols = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      row += " " + cell + " |";
      ++cols;
    }
    md += row + "\n";
    if (header) {
      md += "|";
      for (std::size_t i = 0; i < cols; ++i) md += "---|";
      md += "\n";
      header = false;
    }
  }
  return md;
}

void cmd_report(Context& ctx) {
  std::vector<std::string> inputs = ctx.config.report_inputs;
  if (inputs.empty()) inputs.push_back(ctx.run->root().string());
  json summary = json::array();
  std::string md = "# meshgnn run report\n";
  for (const auto& in : inputs) {
    const fs::path dir(in);
    if (!fs::is_directory(dir)) throw ValidationError("report input " + in + " is not a directory");
    json entry = {{"dir", in}};
    md += "\n## " + in + "\n";
    if (fs::exists(dir / "run_manifest.json")) {
      const json m = read_json(dir / "run_manifest.json");
      entry["subcommand"] = m.value("subcommand", "");
      entry["status"] = m.value("status", "");
      entry["seed"] = m.value("seed", json(nullptr));
      entry["stage_seconds"] = m.value("stage_seconds", json::object());
      md += "\nsubcommand `" + m.value("subcommand", std::string("?")) + "`, status " +
            m.value("status", std::string("?")) + ", seed " + m.value("seed", json()).dump() +
            "\n";
    }
    if (fs::exists(dir / "failed" / "diagnostic.json")) {
      const json f = read_json(dir / "failed" / "diagnostic.json");
      entry["failure"] = f.value("error", "");
      md += "\nfailed run: " + f.value("error", std::string()) + "\n";
    }
    if (fs::exists(dir / "best.json")) {
      const json b = read_json(dir / "best.json");
      entry["best"] = b;
      md += "\nbest (k, l) = (" + b.at("k").dump() + ", " + b.at("l").dump() + "), mse " +
            b.at("mse").dump() + ", " + b.at("evaluations").dump() + " evaluations\n";
    }
    for (const char* name : {"metrics.csv", "pearson.csv", "comparison.csv"}) {
      if (!fs::exists(dir / name)) continue;
      const std::string text = read_text(dir / name);
      entry[name] = text;
      if (std::string(name) == "comparison.csv") {
        md += "\n`comparison.csv` present (" +
              std::to_string(std::count(text.begin(), text.end(), '\n') - 1) + " rows)\n";
      } else {
        md += "\n" + std::string(name) + ":\n\n" + csv_as_markdown(text);
      }
    }
    summary.push_back(entry);
  }
  write_text(ctx.run->output("report.md"), md);
  write_json(ctx.run->output("summary.json"), {{"runs", summary}});
}

using Command = void (*)(Context&);

struct CommandOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string strategy;
  std::string objective;
};

int execute(const std::string& name, Command cmd, const CommandOptions& opt) {
  std::unique_ptr<RunDir> run;
  try {
    run = std::make_unique<RunDir>(opt.out, name);
  } catch (const ValidationError& e) {
    log("error: " + std::string(e.what()));
    return kExitValidation;
  }
  Context ctx;
  ctx.run = run.get();
  json config_doc = nullptr;
  try {
    ctx.config = opt.config.empty() ? RunConfig{} : load_config(opt.config);
    if (!opt.strategy.empty()) ctx.config.optimize.strategy = opt.strategy;
    if (!opt.objective.empty()) ctx.config.optimize.objective = opt.objective;
    if (opt.seed) ctx.config.seed = *opt.seed;
    ctx.config.validate();
    ctx.seed = ctx.config.seed;
    config_doc = to_json(ctx.config);
    Stopwatch sw;
    cmd(ctx);
    run->stage("total", sw.seconds());
    run->succeed(config_doc, ctx.seed);
    return kExitOk;
  } catch (const ValidationError& e) {
    log("validation error: " + std::string(e.what()));
    run->fail(config_doc, ctx.seed, kExitValidation, e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    log("error: " + std::string(e.what()));
    run->fail(config_doc, ctx.seed, kExitRuntime, e.what());
    return kExitRuntime;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Mesh-size optimization with graph neural network surrogates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kSoftwareVersion);

  struct Entry {
    const char* name;
    const char* help;
    Command cmd;
  };
  const Entry entries[] = {
      {"gen-data", "Generate labelled wheel meshes", cmd_gen_data},
      {"preprocess", "Re-mesh at (k, l) and write the graph cache", cmd_preprocess},
      {"train", "Train and evaluate the surrogate at (k, l)", cmd_train},
      {"optimize", "Search (k, l) with Bayesian optimization", cmd_optimize},
      {"mcmc", "Search (k, l) with Metropolis sampling", cmd_mcmc},
      {"study", "Correlate mesh quality with surrogate accuracy", cmd_study},
      {"report", "Summarize finished runs", cmd_report},
  };
  std::vector<CommandOptions> opts(std::size(entries));
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    auto* sub = app.add_subcommand(entries[i].name, entries[i].help);
    auto& o = opts[i];
    sub->add_option("--config", o.config, "JSON config or a previous run_manifest.json")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Root seed (overrides the config)");
    sub->add_option("--out", o.out, "Run directory")->required();
    const std::string n = entries[i].name;
    if (n == "optimize")
      sub->add_option("--strategy", o.strategy, "bo-ei, bo-ucb or mcmc")
          ->check(CLI::IsMember({"bo-ei", "bo-ucb", "mcmc"}));
    if (n == "optimize" || n == "mcmc")
      sub->add_option("--objective", o.objective, "surrogate or toy")
          ->check(CLI::IsMember({"surrogate", "toy"}));
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return execute(entries[i].name, entries[i].cmd, opts[i]);
  }
  return kExitValidation;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace meshgnn
