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

#include "zsc_lab/similarity.h"

#include "zsc_lab/errors.h"
#include "zsc_lab/rng.h"

namespace zsc_lab {

SimilarityEstimate EstimateCpstt(const GameConfig& config, const Policy& pi,
                                 const Policy& pi1, const Policy& pi2,
                                 int64_t n_games, uint64_t seed) {
  if (n_games < 1) throw ContractError("n_games must be >= 1");
  SimilarityEstimate estimate;
  for (int64_t g = 0; g < n_games; ++g) {
    GameState state = NewGame(config, DeriveSeed(seed, "cpstt-deal", g));
    while (!state.terminal) {
      const int seat = state.active_seat;
      Observation obs = Observe(state, seat);
      if (state.last_move.has_value()) obs.sad_hint = state.last_move->action;
      const std::vector<Action> legal = LegalActions(state, seat);
      Action action;
      if (seat == 0) {
        action = pi.Act(obs, legal);
      } else {
        action = pi1.Act(obs, legal);
        // pi2 judges the very same trajectory point through its own encoder.
        if (pi2.Act(obs, legal) == action) ++estimate.matches;
        ++estimate.n_decisions;
      }
      state = Step(state, action).state;
    }
  }
  estimate.n_games = n_games;
  if (estimate.n_decisions == 0)
    throw NumericError("cpstt estimate with zero decision points");
  estimate.value = static_cast<double>(estimate.matches) /
                   static_cast<double>(estimate.n_decisions);
  return estimate;
}

SimilarityEstimate EstimateCpstt(const ModelRecord& pi, const ModelRecord& pi1,
                                 const ModelRecord& pi2, int64_t n_games,
                                 uint64_t seed) {
  if (!pi.game_config.SameRules(pi1.game_config) ||
      !pi.game_config.SameRules(pi2.game_config))
    throw ConfigError("cpstt models have incompatible game rules");
  GreedyModelPolicy p(pi), p1(pi1), p2(pi2);
  return EstimateCpstt(pi.game_config, p, p1, p2, n_games, seed);
}

}  // namespace zsc_lab
