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
// Similarity-based robust training: after an initial pure self-play phase,
// each seat's chosen action is executed with probability alpha and replaced
// by an alternative otherwise. Keeping the per-decision agreement at alpha is
// what ties the training partner to the perturbed partner.

#ifndef ZSC_LAB_SBRT_H_
#define ZSC_LAB_SBRT_H_

#include <vector>

#include "zsc_lab/env.h"
#include "zsc_lab/qlearn.h"
#include "zsc_lab/rng.h"

namespace zsc_lab {

struct PerturbDecision {
  Action executed;
  Action intended;
  bool perturbed = false;
};

// Uniform over legal \ {a_p}. With a single legal action there is no
// alternative and a_p is returned. One rng draw when an alternative exists.
Action RandomAlternative(const std::vector<Action>& legal, const Action& a_p,
                         Rng& rng);

// Argmin of q over legal (fixed-order ties); if the argmin is a_p itself the
// second-lowest is taken so a perturbation always changes the action.
Action WorstAlternative(const QFunction& q, const GameConfig& config,
                        const ObsKey& key, const std::vector<Action>& legal,
                        const Action& a_p);

// Argmax of q over legal \ {a_p} (fixed-order ties).
Action BestAlternative(const QFunction& q, const GameConfig& config,
                       const ObsKey& key, const std::vector<Action>& legal,
                       const Action& a_p);

// Executes a_p with probability alpha, otherwise the mode's alternative. The
// Bernoulli draw is consumed unconditionally so alpha = 1 replays baseline
// trajectories bit-exactly.
PerturbDecision Perturb(const QFunction& q, const GameConfig& config,
                        const ObsKey& key, const std::vector<Action>& legal,
                        const Action& a_p, double alpha, SbrtConfig::Mode mode,
                        Rng& rng);

// Two-phase SBRT training: n_st self-play epochs at alpha = 1, then n_rt
// epochs with both seats' actions perturbed at alpha_r. The returned record
// carries the SbrtConfig.
ModelRecord TrainSbrt(const GameConfig& game_config,
                      const TrainConfig& train_config,
                      const SbrtConfig& sbrt_config);

}  // namespace zsc_lab

#endif  // ZSC_LAB_SBRT_H_
