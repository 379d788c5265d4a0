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

#include "zsc_lab/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "zsc_lab/analysis.h"
#include "zsc_lab/errors.h"
#include "zsc_lab/rng.h"
#include "zsc_lab/sbrt.h"
#include "zsc_lab/util.h"

namespace zsc_lab {

namespace {

using nlohmann::ordered_json;

ordered_json GameToJson(const GameConfig& g) {
  return ordered_json{{"colors", g.colors},
                      {"ranks", g.ranks},
                      {"multiplicity", g.multiplicity},
                      {"hand_size", g.hand_size},
                      {"info_tokens_max", g.info_tokens_max},
                      {"life_tokens_max", g.life_tokens_max},
                      {"seed", g.seed}};
}

GameConfig GameFromJson(const ordered_json& j) {
  if (j.is_string()) return PresetByName(j.get<std::string>());
  GameConfig g;
  g.colors = j.value("colors", g.colors);
  g.ranks = j.value("ranks", g.ranks);
  g.multiplicity = j.value("multiplicity", g.multiplicity);
  g.hand_size = j.value("hand_size", g.hand_size);
  g.info_tokens_max = j.value("info_tokens_max", g.info_tokens_max);
  g.life_tokens_max = j.value("life_tokens_max", g.life_tokens_max);
  g.seed = j.value("seed", g.seed);
  return g;
}

TrainConfig TrainFromJson(const ordered_json& j) {
  TrainConfig t;
  t.episodes_per_epoch = j.value("episodes_per_epoch", t.episodes_per_epoch);
  t.epochs = j.value("epochs", t.epochs);
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.gamma = j.value("gamma", t.gamma);
  t.epsilon_start = j.value("epsilon_start", t.epsilon_start);
  t.epsilon_end = j.value("epsilon_end", t.epsilon_end);
  t.epsilon_decay_epochs =
      j.value("epsilon_decay_epochs", t.epsilon_decay_epochs);
  if (j.contains("level"))
    t.level = AbstractionLevelFromString(j.at("level").get<std::string>());
  return t;
}

SbrtConfig SbrtFromJson(const ordered_json& j) {
  SbrtConfig s;
  s.alpha_r = j.value("alpha_r", s.alpha_r);
  s.n_st = j.value("n_st", s.n_st);
  s.n_rt = j.value("n_rt", s.n_rt);
  if (j.contains("mode"))
    s.mode = SbrtModeFromString(j.at("mode").get<std::string>());
  return s;
}

ordered_json ConfigToJson(const ExperimentConfig& c) {
  ordered_json doc;
  doc["name"] = c.name;
  doc["game"] = GameToJson(c.game);
  ordered_json entries = ordered_json::array();
  for (const FrameworkEntry& e : c.frameworks) {
    ordered_json entry;
    entry["label"] = e.label;
    entry["framework"] = ToString(e.train.framework);
    entry["seeds"] = e.seeds;
    entry["train"] = ordered_json{
        {"episodes_per_epoch", e.train.episodes_per_epoch},
        {"epochs", e.train.epochs},
        {"learning_rate", e.train.learning_rate},
        {"gamma", e.train.gamma},
        {"epsilon_start", e.train.epsilon_start},
        {"epsilon_end", e.train.epsilon_end},
        {"epsilon_decay_epochs", e.train.epsilon_decay_epochs},
        {"level", ToString(e.train.level)}};
    if (e.sbrt.has_value()) {
      entry["sbrt"] = ordered_json{{"alpha_r", e.sbrt->alpha_r},
                                   {"n_st", e.sbrt->n_st},
                                   {"n_rt", e.sbrt->n_rt},
                                   {"mode", ToString(e.sbrt->mode)}};
    }
    entries.push_back(std::move(entry));
  }
  doc["frameworks"] = std::move(entries);
  doc["eval"] = ordered_json{{"n_games", c.eval.n_games},
                             {"cpstt_games", c.eval.cpstt_games},
                             {"master_seed", c.eval.master_seed},
                             {"with_cpstt", c.eval.with_cpstt}};
  doc["output_dir"] = c.output_dir;
  return doc;
}

std::string HexU64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

ordered_json SimilarityToJson(const SimilarityEstimate& s) {
  return ordered_json{{"matches", s.matches},
                      {"n_decisions", s.n_decisions},
                      {"n_games", s.n_games}};
}

SimilarityEstimate SimilarityFromJson(const ordered_json& j) {
  SimilarityEstimate s;
  s.matches = j.at("matches").get<int64_t>();
  s.n_decisions = j.at("n_decisions").get<int64_t>();
  s.n_games = j.at("n_games").get<int64_t>();
  s.value = static_cast<double>(s.matches) /
            static_cast<double>(s.n_decisions);
  return s;
}

// Exact cell totals live in cells.json; crossplay.csv is the derived,
// diff-stable view of the same data.
std::string CellsToJson(const std::vector<CrossPlayCell>& cells) {
  ordered_json doc = ordered_json::array();
  for (const CrossPlayCell& c : cells) {
    ordered_json jc;
    jc["id_a"] = c.id_a;
    jc["id_b"] = c.id_b;
    jc["framework_a"] = c.framework_a;
    jc["framework_b"] = c.framework_b;
    jc["seed_a"] = c.seed_a;
    jc["seed_b"] = c.seed_b;
    jc["score_sum"] = c.totals.score_sum;
    jc["score_sqsum"] = c.totals.score_sqsum;
    jc["n_games"] = c.totals.n_games;
    if (c.cpstt_ab.has_value()) jc["cpstt_ab"] = SimilarityToJson(*c.cpstt_ab);
    if (c.cpstt_ba.has_value()) jc["cpstt_ba"] = SimilarityToJson(*c.cpstt_ba);
    doc.push_back(std::move(jc));
  }
  return doc.dump() + "\n";
}

std::vector<CrossPlayCell> CellsFromJson(const std::string& text) {
  std::vector<CrossPlayCell> cells;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed cells file: ") + e.what());
  }
  for (const ordered_json& jc : doc) {
    CrossPlayCell c;
    c.id_a = jc.at("id_a").get<std::string>();
    c.id_b = jc.at("id_b").get<std::string>();
    c.framework_a = jc.at("framework_a").get<std::string>();
    c.framework_b = jc.at("framework_b").get<std::string>();
    c.seed_a = jc.at("seed_a").get<uint64_t>();
    c.seed_b = jc.at("seed_b").get<uint64_t>();
    c.totals.score_sum = jc.at("score_sum").get<int64_t>();
    c.totals.score_sqsum = jc.at("score_sqsum").get<int64_t>();
    c.totals.n_games = jc.at("n_games").get<int64_t>();
    if (jc.contains("cpstt_ab"))
      c.cpstt_ab = SimilarityFromJson(jc.at("cpstt_ab"));
    if (jc.contains("cpstt_ba"))
      c.cpstt_ba = SimilarityFromJson(jc.at("cpstt_ba"));
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJsonText(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  try {
    ExperimentConfig c;
    c.name = doc.at("name").get<std::string>();
    c.game = GameFromJson(doc.at("game"));
    for (const ordered_json& je : doc.at("frameworks")) {
      FrameworkEntry e;
      e.train = je.contains("train") ? TrainFromJson(je.at("train"))
                                     : TrainConfig{};
      e.train.framework =
          FrameworkFromString(je.at("framework").get<std::string>());
      e.seeds = je.at("seeds").get<std::vector<uint64_t>>();
      if (je.contains("sbrt")) e.sbrt = SbrtFromJson(je.at("sbrt"));
      e.label = je.value("label", ToString(e.train.framework) +
                                      (e.sbrt.has_value() ? "+sbrt" : ""));
      c.frameworks.push_back(std::move(e));
    }
    const ordered_json& ev = doc.at("eval");
    c.eval.n_games = ev.value("n_games", c.eval.n_games);
    c.eval.cpstt_games = ev.value("cpstt_games", c.eval.cpstt_games);
    c.eval.master_seed = ev.value("master_seed", c.eval.master_seed);
    c.eval.with_cpstt = ev.value("with_cpstt", c.eval.with_cpstt);
    c.output_dir = doc.at("output_dir").get<std::string>();
    c.Validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::FromJsonFile(const std::string& path) {
  return FromJsonText(ReadFile(path));
}

void ExperimentConfig::Validate() const {
  if (name.empty() ||
      name.find_first_of("/\\ \t\n") != std::string::npos)
    throw ConfigError("experiment name must be non-empty and filesystem-safe");
  game.Validate();
  if (frameworks.empty())
    throw ConfigError("experiment needs at least one framework entry");
  for (const FrameworkEntry& e : frameworks) {
    if (e.seeds.empty())
      throw ConfigError("framework entry needs at least one seed");
    std::vector<uint64_t> sorted = e.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("seeds must be distinct within a framework entry");
    e.train.Validate();
    if (e.sbrt.has_value()) e.sbrt->Validate(e.train.epochs);
  }
  if (eval.n_games < 2 || eval.n_games % 2 != 0)
    throw ConfigError("eval.n_games must be even and >= 2");
  if (eval.cpstt_games < 1) throw ConfigError("eval.cpstt_games must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
}

std::string ExperimentConfig::Hash() const {
  return HexU64(Fnv1a64(ConfigToJson(*this).dump()));
}

std::string RunManifest::ToJson() const {
  ordered_json doc;
  doc["config_hash"] = config_hash;
  doc["tool_version"] = tool_version;
  ordered_json jmodels = ordered_json::object();
  for (const auto& [id, info] : models) {
    jmodels[id] = ordered_json{{"path", info.path},
                               {"wall_time_sec", info.wall_time_sec}};
  }
  doc["models"] = std::move(jmodels);
  doc["stages"] = ordered_json{{"train", stage_train_done},
                               {"crossplay", stage_crossplay_done},
                               {"analysis", stage_analysis_done}};
  return doc.dump(2) + "\n";
}

RunManifest RunManifest::FromJsonText(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  RunManifest m;
  m.config_hash = doc.at("config_hash").get<std::string>();
  m.tool_version = doc.at("tool_version").get<std::string>();
  for (const auto& [id, info] : doc.at("models").items()) {
    m.models[id] = ModelInfo{info.at("path").get<std::string>(),
                             info.at("wall_time_sec").get<double>()};
  }
  m.stage_train_done = doc.at("stages").at("train").get<bool>();
  m.stage_crossplay_done = doc.at("stages").at("crossplay").get<bool>();
  m.stage_analysis_done = doc.at("stages").at("analysis").get<bool>();
  return m;
}

std::string ManifestPath(const ExperimentConfig& config) {
  return JoinPath(config.output_dir, "manifest.json");
}

std::string SummaryCsv(const ExperimentConfig& config,
                       const std::vector<CrossPlayCell>& cells) {
  auto cell_for = [&cells](const std::string& a,
                           const std::string& b) -> const CrossPlayCell* {
    for (const CrossPlayCell& c : cells) {
      if ((c.id_a == a && c.id_b == b) || (c.id_a == b && c.id_b == a))
        return &c;
    }
    return nullptr;
  };
  std::string out =
      "framework,intra_mean,intra_std_err,intra_n_games,"
      "inter_mean,inter_std_err,inter_n_games\n";
  for (const FrameworkEntry& entry : config.frameworks) {
    MatchTotals intra;
    for (size_t i = 0; i < entry.seeds.size(); ++i) {
      for (size_t j = i + 1; j < entry.seeds.size(); ++j) {
        const CrossPlayCell* c = cell_for(entry.ModelId(entry.seeds[i]),
                                          entry.ModelId(entry.seeds[j]));
        if (c != nullptr) intra.Merge(c->totals);
      }
    }
    // Inter-algorithm partners: baseline (non-SBRT) pools of other base
    // frameworks.
    MatchTotals inter;
    for (const FrameworkEntry& other : config.frameworks) {
      if (other.sbrt.has_value()) continue;
      if (other.train.framework == entry.train.framework) continue;
      for (uint64_t sa : entry.seeds) {
        for (uint64_t sb : other.seeds) {
          const CrossPlayCell* c =
              cell_for(entry.ModelId(sa), other.ModelId(sb));
          if (c != nullptr) inter.Merge(c->totals);
        }
      }
    }
    out += entry.label + ',';
    if (intra.n_games > 0) {
      const ScoreStats s = intra.Stats();
      out += FormatSig6(s.mean) + ',' + FormatSig6(s.std_err) + ',' +
             std::to_string(s.n_games);
    } else {
      out += ",,0";
    }
    out += ',';
    if (inter.n_games > 0) {
      const ScoreStats s = inter.Stats();
      out += FormatSig6(s.mean) + ',' + FormatSig6(s.std_err) + ',' +
             std::to_string(s.n_games);
    } else {
      out += ",,0";
    }
    out += '\n';
  }
  return out;
}

namespace {

void SaveManifest(const ExperimentConfig& config, const RunManifest& manifest) {
  AtomicWriteFile(ManifestPath(config), manifest.ToJson());
}

void RunAnalysisStage(const ExperimentConfig& config,
                      const std::vector<CrossPlayCell>& cells) {
  AtomicWriteFile(JoinPath(config.output_dir, "summary.csv"),
                  SummaryCsv(config, cells));
  const std::vector<ScatterPoint> points = ScatterFromCells(cells);
  if (points.empty()) return;  // CPSTT disabled: no correlation artifacts
  WriteScatterCsv(points, JoinPath(config.output_dir, "scatter.csv"));
  double r_p = std::nan("");
  try {
    r_p = PearsonR(points);
  } catch (const NumericError&) {
  }
  RenderScatterSvg(points, r_p, config.game.MaxScore(),
                   JoinPath(config.output_dir, "scatter.svg"));
  AtomicWriteFile(JoinPath(config.output_dir, "correlation_summary.csv"),
                  CorrelationSummaryCsv(points));
}

}  // namespace

RunManifest RunExperiment(const ExperimentConfig& config, int jobs) {
  config.Validate();
  EnsureDir(config.output_dir);
  EnsureDir(JoinPath(config.output_dir, "models"));
  AtomicWriteFile(JoinPath(config.output_dir, "config.json"),
                  ConfigToJson(config).dump(2) + "\n");

  RunManifest manifest;
  manifest.config_hash = config.Hash();
  const std::string manifest_path = ManifestPath(config);
  if (std::filesystem::exists(manifest_path)) {
    const RunManifest existing =
        RunManifest::FromJsonText(ReadFile(manifest_path));
    if (existing.config_hash != manifest.config_hash)
      throw ConfigError(
          "manifest config hash mismatch; refusing to resume into " +
          config.output_dir);
    manifest = existing;
  }

  // Stage 1: train missing models.
  struct TrainTask {
    const FrameworkEntry* entry;
    uint64_t seed;
    std::string id;
    std::string path;
  };
  std::vector<TrainTask> tasks;
  for (const FrameworkEntry& entry : config.frameworks) {
    for (uint64_t seed : entry.seeds) {
      const std::string id = entry.ModelId(seed);
      const std::string path =
          JoinPath(JoinPath(config.output_dir, "models"), id + ".model.json");
      if (manifest.models.count(id) > 0 && std::filesystem::exists(path))
        continue;
      tasks.push_back({&entry, seed, id, path});
    }
  }
  std::vector<RunManifest::ModelInfo> results(tasks.size());
  ParallelFor(jobs, static_cast<int64_t>(tasks.size()), [&](int64_t i) {
    const TrainTask& task = tasks[i];
    TrainConfig train = task.entry->train;
    train.seed = task.seed;
    const auto start = std::chrono::steady_clock::now();
    const ModelRecord model = TrainModel(config.game, train, task.entry->sbrt);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    AtomicWriteFile(task.path, model.SaveToString());
    results[i] = {task.path, elapsed.count()};
  });
  for (size_t i = 0; i < tasks.size(); ++i)
    manifest.models[tasks[i].id] = results[i];
  manifest.stage_train_done = true;
  SaveManifest(config, manifest);

  // Stage 2: cross-play matrix.
  const std::string cells_path = JoinPath(config.output_dir, "cells.json");
  std::vector<CrossPlayCell> cells;
  if (manifest.stage_crossplay_done && std::filesystem::exists(cells_path)) {
    cells = CellsFromJson(ReadFile(cells_path));
  } else {
    std::vector<ModelRecord> records;
    std::vector<PoolEntry> pool;
    for (const FrameworkEntry& entry : config.frameworks) {
      for (uint64_t seed : entry.seeds) {
        const std::string id = entry.ModelId(seed);
        records.push_back(ModelRecord::LoadFromFile(manifest.models[id].path));
        pool.push_back({id, nullptr});
      }
    }
    for (size_t i = 0; i < pool.size(); ++i) pool[i].model = &records[i];
    cells = CrossPlayMatrix(pool, config.eval.n_games, config.eval.master_seed,
                            config.eval.with_cpstt, config.eval.cpstt_games,
                            /*ordered=*/false, jobs);
    AtomicWriteFile(cells_path, CellsToJson(cells));
    AtomicWriteFile(JoinPath(config.output_dir, "crossplay.csv"),
                    CrossplayCsv(cells));
    manifest.stage_crossplay_done = true;
    SaveManifest(config, manifest);
  }

  // Stage 3: correlation + summary artifacts.
  if (!manifest.stage_analysis_done) {
    RunAnalysisStage(config, cells);
    manifest.stage_analysis_done = true;
    SaveManifest(config, manifest);
  }
  return manifest;
}

void Report(const std::string& manifest_path) {
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();
  const RunManifest manifest =
      RunManifest::FromJsonText(ReadFile(manifest_path));
  if (!manifest.stage_train_done)
    throw ConfigError("manifest incomplete: train stage missing");
  if (!manifest.stage_crossplay_done)
    throw ConfigError("manifest incomplete: crossplay stage missing");
  const ExperimentConfig config =
      ExperimentConfig::FromJsonFile(JoinPath(dir, "config.json"));
  const std::vector<CrossPlayCell> cells =
      CellsFromJson(ReadFile(JoinPath(dir, "cells.json")));
  const std::string summary = SummaryCsv(config, cells);
  AtomicWriteFile(JoinPath(dir, "summary.csv"), summary);

  // Aligned console table.
  std::printf("%-16s %-24s %-24s\n", "framework", "intra-algorithm",
              "inter-algorithm");
  std::istringstream in(summary);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) f.push_back(field);
    f.resize(7);
    const std::string intra =
        f[3] == "0" ? "-" : f[1] + " +/- " + f[2] + " (n=" + f[3] + ")";
    const std::string inter =
        f[6] == "0" ? "-" : f[4] + " +/- " + f[5] + " (n=" + f[6] + ")";
    std::printf("%-16s %-24s %-24s\n", f[0].c_str(), intra.c_str(),
                inter.c_str());
  }
}

}  // namespace zsc_lab
