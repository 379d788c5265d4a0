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

#ifndef ZSC_LAB_POLICY_H_
#define ZSC_LAB_POLICY_H_

#include <cstdint>
#include <vector>

#include "zsc_lab/env.h"
#include "zsc_lab/qlearn.h"

namespace zsc_lab {

// A deterministic evaluation-time policy. Rollout helpers populate
// Observation::sad_hint with the previous actor's action; each policy applies
// its own encoding, so SAD and non-SAD models can share a table.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action Act(const Observation& obs,
                     const std::vector<Action>& legal) const = 0;
};

// Greedy argmax policy over a trained model's Q table, using the model's own
// abstraction level and SAD channel.
class GreedyModelPolicy : public Policy {
 public:
  explicit GreedyModelPolicy(const ModelRecord& model) : model_(&model) {}

  Action Act(const Observation& obs,
             const std::vector<Action>& legal) const override;

 private:
  const ModelRecord* model_;
};

struct EpisodeOutcome {
  int score = 0;
  int turns = 0;
};

// Plays one full greedy game, seat 0 driven by p0 and seat 1 by p1.
EpisodeOutcome PlayEpisode(const GameConfig& config, const Policy& p0,
                           const Policy& p1, uint64_t deal_seed);

}  // namespace zsc_lab

#endif  // ZSC_LAB_POLICY_H_
