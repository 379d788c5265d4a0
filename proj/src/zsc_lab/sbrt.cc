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

#include "zsc_lab/sbrt.h"

#include <algorithm>

#include "zsc_lab/errors.h"

namespace zsc_lab {

namespace {

void RequireMember(const std::vector<Action>& legal, const Action& a_p) {
  if (std::find(legal.begin(), legal.end(), a_p) == legal.end())
    throw ContractError("a_p is not a legal action");
}

}  // namespace

Action RandomAlternative(const std::vector<Action>& legal, const Action& a_p,
                         Rng& rng) {
  RequireMember(legal, a_p);
  if (legal.size() < 2) return a_p;
  const size_t pick = rng.NextBounded(legal.size() - 1);
  size_t seen = 0;
  for (const Action& a : legal) {
    if (a == a_p) continue;
    if (seen == pick) return a;
    ++seen;
  }
  throw ContractError("unreachable: alternative not found");
}

Action WorstAlternative(const QFunction& q, const GameConfig& config,
                        const ObsKey& key, const std::vector<Action>& legal,
                        const Action& a_p) {
  RequireMember(legal, a_p);
  if (legal.size() < 2) return a_p;
  auto argmin_excluding = [&](const Action* excluded) {
    const Action* lowest = nullptr;
    double lowest_v = 0.0;
    for (const Action& a : legal) {
      if (excluded != nullptr && a == *excluded) continue;
      const double v = q.Get(key, ActionIndex(config, a));
      if (lowest == nullptr || v < lowest_v) {
        lowest = &a;
        lowest_v = v;
      }
    }
    return lowest;
  };
  const Action* lowest = argmin_excluding(nullptr);
  // The argmin itself may be a_p; perturbation must still change the action,
  // so fall back to the second-lowest.
  if (*lowest == a_p) lowest = argmin_excluding(&a_p);
  return *lowest;
}

Action BestAlternative(const QFunction& q, const GameConfig& config,
                       const ObsKey& key, const std::vector<Action>& legal,
                       const Action& a_p) {
  RequireMember(legal, a_p);
  if (legal.size() < 2) return a_p;
  const Action* best = nullptr;
  double best_v = 0.0;
  for (const Action& a : legal) {
    if (a == a_p) continue;
    const double v = q.Get(key, ActionIndex(config, a));
    if (best == nullptr || v > best_v) {
      best = &a;
      best_v = v;
    }
  }
  return *best;
}

PerturbDecision Perturb(const QFunction& q, const GameConfig& config,
                        const ObsKey& key, const std::vector<Action>& legal,
                        const Action& a_p, double alpha, SbrtConfig::Mode mode,
                        Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ContractError("alpha must lie in [0, 1]");
  RequireMember(legal, a_p);
  // The Bernoulli is drawn before any branching so the draw schedule is
  // identical whether or not a perturbation happens.
  const bool keep = rng.NextBernoulli(alpha);
  PerturbDecision decision{a_p, a_p, false};
  if (keep || legal.size() < 2) return decision;
  switch (mode) {
    case SbrtConfig::Mode::kWorst:
      decision.executed = WorstAlternative(q, config, key, legal, a_p);
      break;
    case SbrtConfig::Mode::kBest:
      decision.executed = BestAlternative(q, config, key, legal, a_p);
      break;
    case SbrtConfig::Mode::kRandom:
      decision.executed = RandomAlternative(legal, a_p, rng);
      break;
  }
  decision.perturbed = !(decision.executed == a_p);
  return decision;
}

ModelRecord TrainSbrt(const GameConfig& game_config,
                      const TrainConfig& train_config,
                      const SbrtConfig& sbrt_config) {
  return TrainModel(game_config, train_config, sbrt_config);
}

}  // namespace zsc_lab
