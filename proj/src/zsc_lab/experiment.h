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
// Experiment orchestration: a JSON config describes model pools (framework,
// seeds, schedules), the runner trains what is missing, builds the cross-play
// matrix with CPSTT, and emits correlation and summary artifacts. A manifest
// written atomically at each stage boundary makes interrupted runs resumable
// and completed runs idempotent.

#ifndef ZSC_LAB_EXPERIMENT_H_
#define ZSC_LAB_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zsc_lab/crossplay.h"
#include "zsc_lab/qlearn.h"

namespace zsc_lab {

inline constexpr const char* kToolVersion = "0.1.0";

struct FrameworkEntry {
  std::string label;  // defaults to framework name, "+sbrt" appended
  std::vector<uint64_t> seeds;
  TrainConfig train;
  std::optional<SbrtConfig> sbrt;

  std::string ModelId(uint64_t seed) const {
    return label + "-s" + std::to_string(seed);
  }
};

struct EvalConfig {
  int64_t n_games = 2000;
  int64_t cpstt_games = 2000;
  uint64_t master_seed = 1;
  bool with_cpstt = true;
};

struct ExperimentConfig {
  std::string name;
  GameConfig game;
  std::vector<FrameworkEntry> frameworks;
  EvalConfig eval;
  std::string output_dir;

  static ExperimentConfig FromJsonText(const std::string& text);
  static ExperimentConfig FromJsonFile(const std::string& path);
  void Validate() const;

  // Stable content hash used to guard resumption against edited configs.
  std::string Hash() const;
};

struct RunManifest {
  struct ModelInfo {
    std::string path;
    double wall_time_sec = 0.0;
  };

  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::map<std::string, ModelInfo> models;  // keyed by model id
  bool stage_train_done = false;
  bool stage_crossplay_done = false;
  bool stage_analysis_done = false;

  std::string ToJson() const;
  static RunManifest FromJsonText(const std::string& text);
};

// Runs (or resumes) the full pipeline with at most `jobs` parallel tasks.
// Identical bytes are produced at every parallelism level.
RunManifest RunExperiment(const ExperimentConfig& config, int jobs);

// Prints the Table-1-style intra-/inter-algorithm summary for a completed
// manifest and (re)writes summary.csv next to it. Throws ConfigError naming
// the missing stage when the manifest is incomplete.
void Report(const std::string& manifest_path);

// Table-1-style summary rows built from exact cell totals.
std::string SummaryCsv(const ExperimentConfig& config,
                       const std::vector<CrossPlayCell>& cells);

std::string ManifestPath(const ExperimentConfig& config);

}  // namespace zsc_lab

#endif  // ZSC_LAB_EXPERIMENT_H_
