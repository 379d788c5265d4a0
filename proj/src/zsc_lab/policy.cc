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

#include "zsc_lab/policy.h"

namespace zsc_lab {

Action GreedyModelPolicy::Act(const Observation& obs,
                              const std::vector<Action>& legal) const {
  const ObsKey key = EncodeObservation(obs, model_->train_config.level,
                                       model_->sad_channel());
  return GreedyAction(model_->q, model_->game_config, key, legal);
}

EpisodeOutcome PlayEpisode(const GameConfig& config, const Policy& p0,
                           const Policy& p1, uint64_t deal_seed) {
  GameState state = NewGame(config, deal_seed);
  while (!state.terminal) {
    const int seat = state.active_seat;
    Observation obs = Observe(state, seat);
    // In greedy play the previous action is the previous actor's greedy
    // action, which is exactly what SAD-encoded keys expect.
    if (state.last_move.has_value()) obs.sad_hint = state.last_move->action;
    const std::vector<Action> legal = LegalActions(state, seat);
    const Action action =
        seat == 0 ? p0.Act(obs, legal) : p1.Act(obs, legal);
    state = Step(state, action).state;
  }
  return {state.score_at_termination, state.turn_index};
}

}  // namespace zsc_lab
