// Copyright 2026 The zsc-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "zsc_lab/errors.h"
#include "zsc_lab/experiment.h"
#include "zsc_lab/util.h"

using namespace zsc_lab;
namespace fs = std::filesystem;

namespace {

std::string TempDir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("zsc_lab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string SmallConfigJson(const std::string& out_dir) {
  return R"({
    "name": "unit-smoke",
    "game": "hanabi-oracle",
    "frameworks": [
      {
        "framework": "iql",
        "seeds": [1, 2],
        "train": {"episodes_per_epoch": 50, "epochs": 4}
      }
    ],
    "eval": {"n_games": 10, "cpstt_games": 20, "master_seed": 3,
             "with_cpstt": true},
    "output_dir": ")" +
         out_dir + R"("
  })";
}

std::string Slurp(const std::string& path) { return ReadFile(path); }

}  // namespace

TEST_CASE("config parses presets, inline games, and validates") {
  const ExperimentConfig c =
      ExperimentConfig::FromJsonText(SmallConfigJson("/tmp/x"));
  CHECK(c.name == "unit-smoke");
  CHECK(c.game.colors == 1);
  CHECK(c.frameworks.size() == 1);
  CHECK(c.frameworks[0].label == "iql");
  CHECK(c.frameworks[0].ModelId(2) == "iql-s2");
  CHECK(c.eval.n_games == 10);

  const std::string inline_game = R"({
    "name": "g", "output_dir": "/tmp/x",
    "game": {"colors": 2, "ranks": 3, "multiplicity": [2, 2, 1],
             "hand_size": 2, "info_tokens_max": 3, "life_tokens_max": 1},
    "frameworks": [{"framework": "iql", "seeds": [1],
                    "train": {"episodes_per_epoch": 10, "epochs": 2}}],
    "eval": {"n_games": 4}
  })";
  CHECK(ExperimentConfig::FromJsonText(inline_game).game.ranks == 3);

  CHECK_THROWS_AS(ExperimentConfig::FromJsonText("{]"), ConfigError);
  // Duplicate seeds in one pool are rejected.
  std::string dup = SmallConfigJson("/tmp/x");
  dup.replace(dup.find("[1, 2]"), 6, "[1, 1]");
  CHECK_THROWS_AS(ExperimentConfig::FromJsonText(dup), ConfigError);
  // Odd n_games is rejected.
  std::string odd = SmallConfigJson("/tmp/x");
  odd.replace(odd.find("\"n_games\": 10"), 13, "\"n_games\": 9");
  CHECK_THROWS_AS(ExperimentConfig::FromJsonText(odd), ConfigError);
}

TEST_CASE("config hash is stable and content-sensitive") {
  const ExperimentConfig a =
      ExperimentConfig::FromJsonText(SmallConfigJson("/tmp/x"));
  ExperimentConfig b = a;
  CHECK(a.Hash() == b.Hash());
  b.eval.n_games = 12;
  CHECK(a.Hash() != b.Hash());
}

TEST_CASE("sbrt entries default to a distinguishing label") {
  const std::string with_sbrt = R"({
    "name": "g", "output_dir": "/tmp/x", "game": "hanabi-oracle",
    "frameworks": [
      {"framework": "iql", "seeds": [1],
       "train": {"episodes_per_epoch": 10, "epochs": 4}},
      {"framework": "iql", "seeds": [1],
       "train": {"episodes_per_epoch": 10, "epochs": 4},
       "sbrt": {"alpha_r": 0.8, "n_st": 3, "n_rt": 1, "mode": "random"}}
    ],
    "eval": {"n_games": 4}
  })";
  const ExperimentConfig c = ExperimentConfig::FromJsonText(with_sbrt);
  CHECK(c.frameworks[0].label == "iql");
  CHECK(c.frameworks[1].label == "iql+sbrt");
  REQUIRE(c.frameworks[1].sbrt.has_value());
  CHECK(c.frameworks[1].sbrt->n_st == 3);
}

TEST_CASE("run produces the full artifact set") {
  const std::string dir = TempDir("run");
  const ExperimentConfig config =
      ExperimentConfig::FromJsonText(SmallConfigJson(dir));
  const RunManifest manifest = RunExperiment(config, 1);
  CHECK(manifest.stage_train_done);
  CHECK(manifest.stage_crossplay_done);
  CHECK(manifest.stage_analysis_done);
  CHECK(manifest.models.size() == 2);
  for (const char* artifact :
       {"config.json", "manifest.json", "crossplay.csv", "summary.csv",
        "scatter.csv", "scatter.svg", "correlation_summary.csv"}) {
    CHECK_MESSAGE(fs::exists(fs::path(dir) / artifact), artifact);
  }
  CHECK(fs::exists(fs::path(dir) / "models" / "iql-s1.model.json"));
}

TEST_CASE("a second run is a no-op with identical artifacts") {
  const std::string dir = TempDir("idem");
  const ExperimentConfig config =
      ExperimentConfig::FromJsonText(SmallConfigJson(dir));
  RunExperiment(config, 1);
  const std::string crossplay = Slurp(dir + "/crossplay.csv");
  const std::string summary = Slurp(dir + "/summary.csv");
  const auto model_time =
      fs::last_write_time(fs::path(dir) / "models" / "iql-s1.model.json");
  RunExperiment(config, 1);
  CHECK(Slurp(dir + "/crossplay.csv") == crossplay);
  CHECK(Slurp(dir + "/summary.csv") == summary);
  // Trained models are not retrained on resume.
  CHECK(fs::last_write_time(fs::path(dir) / "models" / "iql-s1.model.json") ==
        model_time);
}

TEST_CASE("an edited config fails the hash guard") {
  const std::string dir = TempDir("guard");
  ExperimentConfig config =
      ExperimentConfig::FromJsonText(SmallConfigJson(dir));
  RunExperiment(config, 1);
  config.eval.n_games = 20;
  CHECK_THROWS_AS(RunExperiment(config, 1), ConfigError);
}

TEST_CASE("jobs count does not change any artifact byte") {
  const std::string dir1 = TempDir("jobs1");
  const std::string dir8 = TempDir("jobs8");
  ExperimentConfig c1 = ExperimentConfig::FromJsonText(SmallConfigJson(dir1));
  ExperimentConfig c8 = ExperimentConfig::FromJsonText(SmallConfigJson(dir8));
  RunExperiment(c1, 1);
  RunExperiment(c8, 8);
  for (const char* artifact :
       {"crossplay.csv", "summary.csv", "scatter.csv", "scatter.svg",
        "correlation_summary.csv"}) {
    CHECK_MESSAGE(Slurp(dir1 + "/" + artifact) == Slurp(dir8 + "/" + artifact),
                  artifact);
  }
  CHECK(Slurp(dir1 + "/models/iql-s2.model.json") ==
        Slurp(dir8 + "/models/iql-s2.model.json"));
}

TEST_CASE("manifest round-trips through json") {
  RunManifest m;
  m.config_hash = "abc";
  m.models["iql-s1"] = {"models/iql-s1.model.json", 1.5};
  m.stage_train_done = true;
  const RunManifest back = RunManifest::FromJsonText(m.ToJson());
  CHECK(back.config_hash == "abc");
  CHECK(back.models.at("iql-s1").path == "models/iql-s1.model.json");
  CHECK(back.stage_train_done);
  CHECK_FALSE(back.stage_crossplay_done);
}

TEST_CASE("summary csv has one row per framework label") {
  const std::string dir = TempDir("summary");
  const ExperimentConfig config =
      ExperimentConfig::FromJsonText(SmallConfigJson(dir));
  RunExperiment(config, 1);
  const std::string summary = Slurp(dir + "/summary.csv");
  CHECK(summary.find("framework,intra_mean,intra_std_err,intra_n_games,"
                     "inter_mean,inter_std_err,inter_n_games") == 0);
  CHECK(summary.find("\niql,") != std::string::npos);
}
