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
// zsc_lab: train self-play card-game agents, perturb their partners, measure
// conditional policy similarity, run cross-play matrices and correlation
// reports. `zsc_lab run --config experiments/smoke.json` drives the whole
// pipeline.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zsc_lab/analysis.h"
#include "zsc_lab/crossplay.h"
#include "zsc_lab/errors.h"
#include "zsc_lab/experiment.h"
#include "zsc_lab/sbrt.h"
#include "zsc_lab/similarity.h"
#include "zsc_lab/util.h"

namespace {

using namespace zsc_lab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct TrainArgs {
  std::string preset = "hanabi-small";
  std::string framework = "iql";
  uint64_t seed = 1;
  int episodes_per_epoch = 1000;
  int epochs = 50;
  double learning_rate = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_epochs = 0;
  std::string level = "compact";
  std::string out;
};

void AddTrainOptions(CLI::App* cmd, TrainArgs& args) {
  cmd->add_option("--preset", args.preset,
                  "Game preset (hanabi-full, hanabi-small, hanabi-oracle)");
  cmd->add_option("--framework", args.framework, "iql, vdn or sad");
  cmd->add_option("--seed", args.seed, "Training seed");
  cmd->add_option("--episodes-per-epoch", args.episodes_per_epoch, "");
  cmd->add_option("--epochs", args.epochs, "");
  cmd->add_option("--lr", args.learning_rate, "Learning rate in (0, 1]");
  cmd->add_option("--gamma", args.gamma, "Discount in [0, 1]");
  cmd->add_option("--eps-start", args.epsilon_start, "");
  cmd->add_option("--eps-end", args.epsilon_end, "");
  cmd->add_option("--eps-decay", args.epsilon_decay_epochs,
                  "Anneal horizon in epochs (0: 80% of epochs)");
  cmd->add_option("--level", args.level, "Key abstraction: compact or full");
  cmd->add_option("--out", args.out, "Output model file")->required();
}

TrainConfig MakeTrainConfig(const TrainArgs& args) {
  TrainConfig t;
  t.framework = FrameworkFromString(args.framework);
  t.episodes_per_epoch = args.episodes_per_epoch;
  t.epochs = args.epochs;
  t.learning_rate = args.learning_rate;
  t.gamma = args.gamma;
  t.epsilon_start = args.epsilon_start;
  t.epsilon_end = args.epsilon_end;
  t.epsilon_decay_epochs = args.epsilon_decay_epochs;
  t.seed = args.seed;
  t.level = AbstractionLevelFromString(args.level);
  return t;
}

int DefaultJobs() {
  if (const char* env = std::getenv("ZSC_LAB_JOBS")) {
    const int jobs = std::atoi(env);
    if (jobs >= 1) return jobs;
  }
  return 1;
}

int Run(int argc, char** argv) {
  CLI::App app{"zero-shot coordination laboratory"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train one self-play model");
  AddTrainOptions(train_cmd, train_args);

  TrainArgs sbrt_args;
  double alpha_r = 0.8;
  int n_st = 40, n_rt = 10;
  std::string mode = "random";
  CLI::App* sbrt_cmd = app.add_subcommand(
      "sbrt-train", "Train one model with perturbed-partner robust phase");
  AddTrainOptions(sbrt_cmd, sbrt_args);
  sbrt_cmd->add_option("--alpha-r", alpha_r,
                       "Partner agreement level in the robust phase");
  sbrt_cmd->add_option("--n-st", n_st, "Self-play epochs");
  sbrt_cmd->add_option("--n-rt", n_rt, "Robust epochs");
  sbrt_cmd->add_option("--mode", mode, "worst, best or random");

  std::vector<std::string> model_paths;
  int64_t games = 2000;
  uint64_t seed = 1;
  int64_t cpstt_games = 2000;
  bool with_cpstt = false;
  bool ordered = false;
  std::string out_path;
  CLI::App* cross_cmd =
      app.add_subcommand("crossplay", "Pairwise cross-play matrix");
  cross_cmd->add_option("--models", model_paths, "Model files")
      ->required()
      ->expected(-2);
  cross_cmd->add_option("--games", games, "Games per pair (even)");
  cross_cmd->add_option("--seed", seed, "Master seed");
  cross_cmd->add_flag("--with-cpstt", with_cpstt, "Estimate CPSTT per cell");
  cross_cmd->add_option("--cpstt-games", cpstt_games, "");
  cross_cmd->add_flag("--ordered", ordered,
                      "All ordered pairs including self-pairs");
  cross_cmd->add_option("--out", out_path, "Output CSV")->required();

  std::string pi_path, pi1_path, pi2_path;
  CLI::App* cpstt_cmd = app.add_subcommand(
      "cpstt", "Conditional policy similarity of pi1 vs pi2, conditioned on "
               "pi");
  cpstt_cmd->add_option("--pi", pi_path, "")->required();
  cpstt_cmd->add_option("--pi1", pi1_path, "")->required();
  cpstt_cmd->add_option("--pi2", pi2_path, "")->required();
  cpstt_cmd->add_option("--games", games, "");
  cpstt_cmd->add_option("--seed", seed, "");

  std::string matrix_path, out_dir;
  int permutation = 0;
  uint64_t perm_seed = 1;
  double max_score_opt = 0.0;
  CLI::App* corr_cmd = app.add_subcommand(
      "correlate", "Scatter + Pearson correlation from a cross-play matrix");
  corr_cmd->add_option("--matrix", matrix_path, "crossplay.csv")->required();
  corr_cmd->add_option("--out", out_dir, "Output directory")->required();
  corr_cmd->add_option("--permutation", permutation,
                       "Permutation-test shuffle count (0: off)");
  corr_cmd->add_option("--perm-seed", perm_seed, "");
  corr_cmd->add_option("--max-score", max_score_opt,
                       "Y-axis upper bound (0: from data)");

  std::string manifest_path;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Intra-/inter-algorithm summary table");
  report_cmd->add_option("--manifest", manifest_path, "manifest.json")
      ->required();

  std::string config_path;
  int jobs = DefaultJobs();
  CLI::App* run_cmd = app.add_subcommand("run", "Full experiment pipeline");
  run_cmd->add_option("--config", config_path, "Experiment JSON")->required();
  run_cmd->add_option("--jobs", jobs, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  if (train_cmd->parsed()) {
    const GameConfig game = PresetByName(train_args.preset);
    const ModelRecord model = TrainSelfplay(game, MakeTrainConfig(train_args));
    AtomicWriteFile(train_args.out, model.SaveToString());
    std::printf("wrote %s (%zu keys)\n", train_args.out.c_str(),
                model.q.NumKeys());
  } else if (sbrt_cmd->parsed()) {
    const GameConfig game = PresetByName(sbrt_args.preset);
    SbrtConfig sbrt;
    sbrt.alpha_r = alpha_r;
    sbrt.n_st = n_st;
    sbrt.n_rt = n_rt;
    sbrt.mode = SbrtModeFromString(mode);
    TrainConfig train = MakeTrainConfig(sbrt_args);
    train.epochs = n_st + n_rt;
    const ModelRecord model = TrainSbrt(game, train, sbrt);
    AtomicWriteFile(sbrt_args.out, model.SaveToString());
    std::printf("wrote %s (%zu keys)\n", sbrt_args.out.c_str(),
                model.q.NumKeys());
  } else if (cross_cmd->parsed()) {
    std::vector<ModelRecord> records;
    std::vector<PoolEntry> pool;
    records.reserve(model_paths.size());
    for (const std::string& path : model_paths) {
      records.push_back(ModelRecord::LoadFromFile(path));
      pool.push_back({std::filesystem::path(path).stem().string(), nullptr});
    }
    for (size_t i = 0; i < pool.size(); ++i) pool[i].model = &records[i];
    const std::vector<CrossPlayCell> cells =
        CrossPlayMatrix(pool, games, seed, with_cpstt, cpstt_games, ordered,
                        DefaultJobs());
    AtomicWriteFile(out_path, CrossplayCsv(cells));
    std::printf("wrote %s (%zu cells)\n", out_path.c_str(), cells.size());
  } else if (cpstt_cmd->parsed()) {
    const ModelRecord pi = ModelRecord::LoadFromFile(pi_path);
    const ModelRecord pi1 = ModelRecord::LoadFromFile(pi1_path);
    const ModelRecord pi2 = ModelRecord::LoadFromFile(pi2_path);
    const SimilarityEstimate estimate =
        EstimateCpstt(pi, pi1, pi2, games, seed);
    std::printf("pi,pi1,pi2,value,n_decisions,n_games\n");
    std::printf("%s,%s,%s,%s,%lld,%lld\n", pi_path.c_str(), pi1_path.c_str(),
                pi2_path.c_str(), FormatSig6(estimate.value).c_str(),
                static_cast<long long>(estimate.n_decisions),
                static_cast<long long>(estimate.n_games));
  } else if (corr_cmd->parsed()) {
    const std::vector<ScatterPoint> points =
        ScatterFromCrossplayCsv(ReadFile(matrix_path));
    if (points.empty())
      throw ConfigError("matrix has no CPSTT columns to correlate");
    EnsureDir(out_dir);
    WriteScatterCsv(points, out_dir + "/scatter.csv");
    double r_p = std::nan("");
    try {
      r_p = PearsonR(points);
    } catch (const NumericError&) {
    }
    double max_score = max_score_opt;
    if (max_score <= 0.0)
      for (const ScatterPoint& p : points)
        max_score = std::max(max_score, p.y);
    RenderScatterSvg(points, r_p, max_score > 0 ? max_score : 1.0,
                     out_dir + "/scatter.svg");
    AtomicWriteFile(out_dir + "/summary.csv", CorrelationSummaryCsv(points));
    std::printf("r_p = %s over %zu points\n", FormatSig6(r_p).c_str(),
                points.size());
    if (permutation > 0) {
      const double p = PermutationPValue(points, permutation, perm_seed);
      std::printf("permutation p = %s (%d shuffles)\n", FormatSig6(p).c_str(),
                  permutation);
    }
  } else if (report_cmd->parsed()) {
    Report(manifest_path);
  } else if (run_cmd->parsed()) {
    const ExperimentConfig config =
        ExperimentConfig::FromJsonFile(config_path);
    RunExperiment(config, jobs);
    std::printf("experiment '%s' complete; artifacts in %s\n",
                config.name.c_str(), config.output_dir.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "contract error: %s\n", e.what());
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  }
}
