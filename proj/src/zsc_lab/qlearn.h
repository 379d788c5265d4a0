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
// Keyed tabular Q-learning self-play trainers: IQL, a turn-based VDN
// adaptation, and SAD-style training where partners observe the actor's
// greedy action. Both seats share one table (parameter sharing), so each
// trained model is its own training partner.

#ifndef ZSC_LAB_QLEARN_H_
#define ZSC_LAB_QLEARN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zsc_lab/env.h"
#include "zsc_lab/rng.h"

namespace zsc_lab {

enum class Framework : uint8_t { kIql = 0, kVdn = 1, kSad = 2 };

Framework FrameworkFromString(const std::string& name);
std::string ToString(Framework framework);

// Sparse action-value table. Absent entries read as default_value; only
// entries that have been written are serialized, keeping model files small
// and diff-stable.
class QFunction {
 public:
  QFunction() = default;
  QFunction(int num_actions, double default_value, AbstractionLevel level)
      : num_actions_(num_actions),
        default_value_(default_value),
        level_(level) {}

  double Get(const ObsKey& key, int action_index) const;
  void Set(const ObsKey& key, int action_index, double value);

  // Max over the given legal actions (by global index).
  double MaxOver(const ObsKey& key, const std::vector<int>& legal_indices)
      const;

  int num_actions() const { return num_actions_; }
  double default_value() const { return default_value_; }
  AbstractionLevel level() const { return level_; }
  size_t NumKeys() const { return rows_.size(); }

  // Written entries as (key, action index, value), sorted by (hex key,
  // action index). Throws NumericError on any non-finite entry.
  std::vector<std::tuple<std::string, int, double>> SortedEntries() const;

 private:
  struct Row {
    std::vector<double> values;
    std::vector<bool> written;
  };

  int num_actions_ = 0;
  double default_value_ = 0.0;
  AbstractionLevel level_ = AbstractionLevel::kCompact;
  std::unordered_map<ObsKey, Row> rows_;
};

struct TrainConfig {
  Framework framework = Framework::kIql;
  int episodes_per_epoch = 1000;
  int epochs = 50;
  double learning_rate = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Linear anneal horizon; 0 means "80% of epochs".
  int epsilon_decay_epochs = 0;
  uint64_t seed = 0;
  AbstractionLevel level = AbstractionLevel::kCompact;

  int EffectiveDecayEpochs() const;
  double EpsilonForEpoch(int epoch) const;
  void Validate() const;
};

// Two-phase perturbed-partner training schedule; see sbrt.h for the
// operations that consume it.
struct SbrtConfig {
  double alpha_r = 0.8;
  int n_st = 40;  // pure self-play epochs
  int n_rt = 10;  // robust (perturbed) epochs
  enum class Mode : uint8_t { kWorst = 0, kBest = 1, kRandom = 2 };
  Mode mode = Mode::kRandom;

  void Validate(int total_epochs) const;
};

SbrtConfig::Mode SbrtModeFromString(const std::string& name);
std::string ToString(SbrtConfig::Mode mode);

// A trained model plus its full provenance. Round-trips bit-exactly through
// Save/Load.
struct ModelRecord {
  static constexpr int kFormatVersion = 1;

  QFunction q;
  GameConfig game_config;
  TrainConfig train_config;
  std::optional<SbrtConfig> sbrt_config;
  Framework framework = Framework::kIql;
  uint64_t seed = 0;

  SadChannel sad_channel() const {
    return framework == Framework::kSad ? SadChannel::kOn : SadChannel::kOff;
  }

  // Versioned JSON document; entries sorted so files are diff-stable.
  // `include_sbrt` exists so the alpha_r=1 boundary check can compare
  // training content independent of schedule provenance.
  std::string SaveToString(bool include_sbrt = true) const;
  void SaveToFile(const std::string& path) const;
  static ModelRecord LoadFromString(const std::string& text);
  static ModelRecord LoadFromFile(const std::string& path);
};

// Greedy argmax over the legal actions; ties go to the earliest action in the
// fixed legal ordering, keeping evaluation deterministic.
Action GreedyAction(const QFunction& q, const GameConfig& config,
                    const ObsKey& key, const std::vector<Action>& legal);

// Epsilon-greedy: one Bernoulli draw, then one uniform draw only on the
// explore branch.
Action EpsilonGreedy(const QFunction& q, const GameConfig& config,
                     const ObsKey& key, const std::vector<Action>& legal,
                     double epsilon, Rng& rng);

// One seat's cross-turn transition: the accumulated discounted reward between
// this seat's consecutive decisions and the discount gamma^elapsed.
struct Transition {
  ObsKey key;
  int action_index = 0;
  double reward = 0.0;        // sum_t gamma^t r_t over the gap
  double gamma_elapsed = 1.0;  // gamma^(elapsed turns)
  std::optional<ObsKey> next_key;  // nullopt at terminal
  std::vector<int> next_legal_indices;
};

void TdUpdateIql(QFunction& q, const Transition& t, double learning_rate);

// Both seats' consecutive turns as one joint step; the joint value is the sum
// of the two entries and the full TD error is applied to each addend.
struct RoundTransition {
  struct SeatStep {
    ObsKey key;
    int action_index = 0;
  };
  std::vector<SeatStep> steps;  // one or two, in acting order
  double reward = 0.0;          // discounted within the round
  double gamma_round = 1.0;     // gamma^(turns in round), gamma^2 when full
  // Next decision keys per acting seat; nullopt when that seat never acts
  // again (bootstrap 0).
  std::vector<std::optional<ObsKey>> next_keys;
  std::vector<std::vector<int>> next_legal_indices;
};

void TdUpdateVdn(QFunction& q, const RoundTransition& t, double learning_rate);

// SAD observation augmentation: the partner sees the actor's greedy action
// alongside whatever was actually executed.
Observation SadAugment(const Observation& obs, const Action& greedy,
                       const Action& executed);

// Self-play training with parameter sharing. Deterministic in (configs,
// seed): every random draw comes from a stream derived per (purpose,
// episode).
ModelRecord TrainSelfplay(const GameConfig& game_config,
                          const TrainConfig& train_config);

// Shared training core; TrainSelfplay and TrainSbrt are thin wrappers over
// it. A present `sbrt` enables partner perturbation in the robust phase.
ModelRecord TrainModel(const GameConfig& game_config,
                       const TrainConfig& train_config,
                       const std::optional<SbrtConfig>& sbrt);

}  // namespace zsc_lab

#endif  // ZSC_LAB_QLEARN_H_
