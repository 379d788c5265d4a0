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
// Monte-Carlo conditional policy similarity: play pi with pi1, and at every
// decision point of pi1 ask whether pi2 would have chosen the same action on
// the same underlying observation (each policy through its own encoding).

#ifndef ZSC_LAB_SIMILARITY_H_
#define ZSC_LAB_SIMILARITY_H_

#include <cstdint>

#include "zsc_lab/policy.h"
#include "zsc_lab/qlearn.h"

namespace zsc_lab {

struct SimilarityEstimate {
  double value = 0.0;
  int64_t matches = 0;
  int64_t n_decisions = 0;
  int64_t n_games = 0;
};

// Policy-level estimator; pi sits on seat 0, pi1 on seat 1, both greedy.
SimilarityEstimate EstimateCpstt(const GameConfig& config, const Policy& pi,
                                 const Policy& pi1, const Policy& pi2,
                                 int64_t n_games, uint64_t seed);

// Model-level wrapper. CPSTT of a pair under parameter sharing is
// EstimateCpstt(pi_a, pi_b, pi_a, ...): the conditioning agent's training
// partner is itself. Throws ConfigError on incompatible game rules.
SimilarityEstimate EstimateCpstt(const ModelRecord& pi, const ModelRecord& pi1,
                                 const ModelRecord& pi2, int64_t n_games,
                                 uint64_t seed);

}  // namespace zsc_lab

#endif  // ZSC_LAB_SIMILARITY_H_
