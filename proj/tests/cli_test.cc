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
//
// Shells out to the built zsc_lab binary and checks subcommands, artifacts
// and exit codes end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "zsc_lab/util.h"

using namespace zsc_lab;
namespace fs = std::filesystem;

namespace {

const char* kCli = ZSC_LAB_CLI_PATH;

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(kCli) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string TempDir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("zsc_lab_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("train writes a loadable model and is deterministic") {
  const std::string dir = TempDir("train");
  const std::string common =
      "train --preset hanabi-oracle --framework iql --seed 4 "
      "--episodes-per-epoch 50 --epochs 4 --out ";
  CHECK(RunCli(common + dir + "/a.model.json") == 0);
  CHECK(RunCli(common + dir + "/b.model.json") == 0);
  CHECK(ReadFile(dir + "/a.model.json") == ReadFile(dir + "/b.model.json"));
  CHECK(ReadFile(dir + "/a.model.json").find("\"format_version\"") !=
        std::string::npos);
}

TEST_CASE("bad arguments exit with the config code") {
  const std::string dir = TempDir("bad");
  CHECK(RunCli("train --preset hanabi-nope --out " + dir + "/x.json") == 2);
  CHECK(RunCli("train --preset hanabi-oracle --lr 0 --out " + dir +
               "/x.json") == 2);
  CHECK(RunCli("run --config " + dir + "/missing.json") == 4);
}

TEST_CASE("crossplay, cpstt and correlate chain together") {
  const std::string dir = TempDir("chain");
  for (int seed : {1, 2, 3}) {
    REQUIRE(RunCli("train --preset hanabi-oracle --seed " +
                   std::to_string(seed) +
                   " --episodes-per-epoch 50 --epochs 4 --out " + dir + "/m" +
                   std::to_string(seed) + ".model.json") == 0);
  }
  const std::string models =
      dir + "/m1.model.json " + dir + "/m2.model.json " + dir +
      "/m3.model.json";
  CHECK(RunCli("crossplay --models " + models +
               " --games 10 --seed 5 --with-cpstt --cpstt-games 50 --out " +
               dir + "/crossplay.csv") == 0);
  const std::string csv = ReadFile(dir + "/crossplay.csv");
  CHECK(csv.find("model_a,model_b") == 0);

  CHECK(RunCli("cpstt --pi " + dir + "/m1.model.json --pi1 " + dir +
               "/m2.model.json --pi2 " + dir +
               "/m1.model.json --games 50 --seed 7") == 0);

  CHECK(RunCli("correlate --matrix " + dir + "/crossplay.csv --out " + dir +
               "/corr --permutation 99 --perm-seed 3") == 0);
  CHECK(fs::exists(dir + "/corr/scatter.csv"));
  CHECK(fs::exists(dir + "/corr/scatter.svg"));
  CHECK(fs::exists(dir + "/corr/summary.csv"));
}

TEST_CASE("run executes the smoke config and report reads the manifest") {
  const std::string dir = TempDir("run");
  const std::string config_path = dir + "/smoke.json";
  {
    std::ofstream out(config_path);
    out << R"({"name": "cli-smoke", "game": "hanabi-oracle",
               "frameworks": [{"framework": "iql", "seeds": [1, 2],
                 "train": {"episodes_per_epoch": 50, "epochs": 4}}],
               "eval": {"n_games": 10, "cpstt_games": 20, "master_seed": 3},
               "output_dir": ")"
        << dir << R"(/out"})";
  }
  CHECK(RunCli("run --config " + config_path + " --jobs 2") == 0);
  CHECK(fs::exists(dir + "/out/crossplay.csv"));
  CHECK(fs::exists(dir + "/out/scatter.svg"));
  CHECK(RunCli("report --manifest " + dir + "/out/manifest.json") == 0);
}
