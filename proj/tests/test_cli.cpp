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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meshgnn/cli.hpp"
#include "meshgnn/config.hpp"

namespace meshgnn {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("meshgnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& name, const json& doc) {
    const fs::path p = root_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  static json small() {
    return json::parse(R"({
      "dataset": {"count": 20, "resolution": 24},
      "mesh": {"k": 0, "l": 80},
      "bounds": {"k_min": 0, "k_max": 1, "l_min": 60, "l_max": 120},
      "model": {"graph_dims": [8, 8], "dense_dims": [8, 4]},
      "train": {"learning_rate": 0.001, "max_epochs": 5, "patience": 3},
      "optimize": {"t_max": 3, "p_max": 2},
      "mcmc": {"evaluations": 3},
      "study": {"samples": 3}
    })");
  }

  int run(const std::string& sub, const fs::path& config, const std::string& out,
          std::vector<std::string> extra = {}) {
    std::vector<std::string> args{sub, "--out", (root_ / out).string(), "--seed", "3"};
    if (!config.empty()) {
      args.push_back("--config");
      args.push_back(config.string());
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  fs::path root_;
};

TEST_F(Cli, GenDataWritesMeshesLabelsAndManifest) {
  ASSERT_EQ(run("gen-data", write_config("c.json", small()), "data"), kExitOk);
  const fs::path d = root_ / "data";
  const json ds = json::parse(slurp(d / "dataset.json"));
  ASSERT_EQ(ds["items"].size(), 20u);
  EXPECT_TRUE(fs::exists(d / ds["items"][0]["mesh"].get<std::string>()));
  EXPECT_EQ(slurp(d / "labels.csv").substr(0, 32), "name,mass,rim_proxy,disk_proxy\nw");
  const json m = json::parse(slurp(d / "run_manifest.json"));
  EXPECT_EQ(m["subcommand"], "gen-data");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["seed"], 3);
  EXPECT_EQ(m["software_version"], kSoftwareVersion);
  EXPECT_FALSE(fs::exists(d / ".lock"));
}

TEST_F(Cli, ManifestReusedAsConfigReproducesOutputs) {
  ASSERT_EQ(run("gen-data", write_config("c.json", small()), "a"), kExitOk);
  ASSERT_EQ(run_cli({"gen-data", "--config", (root_ / "a" / "run_manifest.json").string(),
                     "--out", (root_ / "b").string()}),
            kExitOk);
  EXPECT_EQ(slurp(root_ / "a" / "labels.csv"), slurp(root_ / "b" / "labels.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "dataset.json"), slurp(root_ / "b" / "dataset.json"));
}

TEST_F(Cli, PipelineFromDatasetDirectory) {
  json cfg = small();
  ASSERT_EQ(run("gen-data", write_config("g.json", cfg), "data"), kExitOk);
  cfg["dataset"]["dir"] = (root_ / "data").string();
  const fs::path c = write_config("c.json", cfg);

  ASSERT_EQ(run("preprocess", c, "pre"), kExitOk);
  const json g = json::parse(slurp(root_ / "pre" / "graphs.json"));
  EXPECT_EQ(g["items"].size(), 20u);
  EXPECT_EQ(g["split"]["train"].size(), 16u);
  EXPECT_TRUE(fs::exists(root_ / "pre" / g["items"][3]["graph"].get<std::string>()));

  ASSERT_EQ(run("train", c, "train1"), kExitOk);
  ASSERT_EQ(run("train", c, "train2"), kExitOk);
  const std::string metrics = slurp(root_ / "train1" / "metrics.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "performance,split,rmse,mape,r2");
  EXPECT_EQ(metrics, slurp(root_ / "train2" / "metrics.csv"));
  EXPECT_TRUE(fs::exists(root_ / "train1" / "checkpoint.json"));

  ASSERT_EQ(run("optimize", c, "opt"), kExitOk);
  const json best = json::parse(slurp(root_ / "opt" / "best.json"));
  EXPECT_GE(best["k"].get<int>(), 0);
  EXPECT_LE(best["l"].get<int>(), 120);
  EXPECT_TRUE(fs::exists(root_ / "opt" / "metrics.csv"));
  EXPECT_EQ(slurp(root_ / "opt" / "history.csv").substr(0, 40),
            history_csv_header().substr(0, 40));

  ASSERT_EQ(run("mcmc", c, "mcmc"), kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "mcmc" / "chain.csv"));

  ASSERT_EQ(run("study", c, "study"), kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "study" / "pearson.csv"));

  json rep = {{"report", {{"inputs", {(root_ / "train1").string(), (root_ / "opt").string(),
                                      (root_ / "study").string()}}}}};
  ASSERT_EQ(run("report", write_config("r.json", rep), "report"), kExitOk);
  const std::string md = slurp(root_ / "report" / "report.md");
  EXPECT_NE(md.find("best (k, l)"), std::string::npos);
  EXPECT_NE(md.find("pearson.csv"), std::string::npos);
}

TEST_F(Cli, ToyOptimizeFindsTheCentre) {
  const json cfg = {{"bounds", {{"k_min", 2}, {"k_max", 4}, {"l_min", 30}, {"l_max", 70}}},
                    {"optimize", {{"t_max", 40}, {"p_max", 40}}}};
  ASSERT_EQ(run("optimize", write_config("c.json", cfg), "toy", {"--objective", "toy"}), kExitOk);
  const json best = json::parse(slurp(root_ / "toy" / "best.json"));
  EXPECT_EQ(best["k"], 3);
  EXPECT_EQ(best["l"], 50);
  EXPECT_FALSE(fs::exists(root_ / "toy" / "checkpoint.json"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}), kExitValidation);
  EXPECT_EQ(run_cli({"frobnicate"}), kExitValidation);
  EXPECT_EQ(run_cli({"train"}), kExitValidation);  // --out is required
  EXPECT_EQ(run("train", root_ / "missing.json", "x"), kExitValidation);
  EXPECT_EQ(run("optimize", {}, "x", {"--strategy", "grid"}), kExitValidation);

  EXPECT_EQ(run("train", write_config("bad.json", {{"trian", 1}}), "bad"), kExitValidation);
  const json diag = json::parse(slurp(root_ / "bad" / "failed" / "diagnostic.json"));
  EXPECT_EQ(diag["exit_code"], kExitValidation);
  EXPECT_NE(diag["error"].get<std::string>().find("trian"), std::string::npos);

  json boom = small();
  boom["dataset"]["count"] = 10;
  boom["train"]["learning_rate"] = 1e300;
  EXPECT_EQ(run("train", write_config("boom.json", boom), "boom"), kExitRuntime);
  EXPECT_TRUE(fs::exists(root_ / "boom" / "failed" / "diagnostic.json"));
  EXPECT_TRUE(fs::exists(root_ / "boom" / "failed" / "split.json"));
  EXPECT_FALSE(fs::exists(root_ / "boom" / "split.json"));
  EXPECT_FALSE(fs::exists(root_ / "boom" / "run_manifest.json"));
}

TEST_F(Cli, LockedRunDirectoryIsRefused) {
  fs::create_directories(root_ / "busy");
  std::ofstream(root_ / "busy" / ".lock") << "1\n";
  EXPECT_EQ(run("gen-data", write_config("c.json", small()), "busy"), kExitValidation);
  EXPECT_FALSE(fs::exists(root_ / "busy" / "dataset.json"));
  EXPECT_TRUE(fs::exists(root_ / "busy" / ".lock"));
}

TEST_F(Cli, SeedFlagOverridesConfig) {
  json cfg = small();
  cfg["seed"] = 99;
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("gen-data", c, "a"), kExitOk);  // --seed 3
  ASSERT_EQ(run_cli({"gen-data", "--config", c.string(), "--out", (root_ / "b").string()}),
            kExitOk);
  EXPECT_EQ(json::parse(slurp(root_ / "a" / "run_manifest.json"))["seed"], 3);
  EXPECT_EQ(json::parse(slurp(root_ / "b" / "run_manifest.json"))["seed"], 99);
  EXPECT_NE(slurp(root_ / "a" / "labels.csv"), slurp(root_ / "b" / "labels.csv"));
}

}  // namespace
}  // namespace meshgnn
