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

#include "zsc_lab/qlearn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "zsc_lab/errors.h"
#include "zsc_lab/sbrt.h"

namespace zsc_lab {

namespace {

using nlohmann::ordered_json;

std::string ToHex(const std::string& bytes) {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::string FromHex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ConfigError("odd-length obskey hex");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw ConfigError("bad obskey hex digit");
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2)
    out.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  return out;
}

std::vector<int> LegalIndices(const GameConfig& config,
                              const std::vector<Action>& legal) {
  std::vector<int> out;
  out.reserve(legal.size());
  for (const Action& a : legal) out.push_back(ActionIndex(config, a));
  return out;
}

ordered_json GameConfigToJson(const GameConfig& g) {
  return ordered_json{{"colors", g.colors},
                      {"ranks", g.ranks},
                      {"multiplicity", g.multiplicity},
                      {"hand_size", g.hand_size},
                      {"info_tokens_max", g.info_tokens_max},
                      {"life_tokens_max", g.life_tokens_max},
                      {"seed", g.seed}};
}

GameConfig GameConfigFromJson(const ordered_json& j) {
  GameConfig g;
  g.colors = j.at("colors").get<int>();
  g.ranks = j.at("ranks").get<int>();
  g.multiplicity = j.at("multiplicity").get<std::vector<int>>();
  g.hand_size = j.at("hand_size").get<int>();
  g.info_tokens_max = j.at("info_tokens_max").get<int>();
  g.life_tokens_max = j.at("life_tokens_max").get<int>();
  g.seed = j.at("seed").get<uint64_t>();
  return g;
}

ordered_json TrainConfigToJson(const TrainConfig& t) {
  return ordered_json{{"framework", ToString(t.framework)},
                      {"episodes_per_epoch", t.episodes_per_epoch},
                      {"epochs", t.epochs},
                      {"learning_rate", t.learning_rate},
                      {"gamma", t.gamma},
                      {"epsilon_start", t.epsilon_start},
                      {"epsilon_end", t.epsilon_end},
                      {"epsilon_decay_epochs", t.epsilon_decay_epochs},
                      {"seed", t.seed},
                      {"level", ToString(t.level)}};
}

TrainConfig TrainConfigFromJson(const ordered_json& j) {
  TrainConfig t;
  t.framework = FrameworkFromString(j.at("framework").get<std::string>());
  t.episodes_per_epoch = j.at("episodes_per_epoch").get<int>();
  t.epochs = j.at("epochs").get<int>();
  t.learning_rate = j.at("learning_rate").get<double>();
  t.gamma = j.at("gamma").get<double>();
  t.epsilon_start = j.at("epsilon_start").get<double>();
  t.epsilon_end = j.at("epsilon_end").get<double>();
  t.epsilon_decay_epochs = j.at("epsilon_decay_epochs").get<int>();
  t.seed = j.at("seed").get<uint64_t>();
  t.level = AbstractionLevelFromString(j.at("level").get<std::string>());
  return t;
}

ordered_json SbrtConfigToJson(const SbrtConfig& s) {
  return ordered_json{{"alpha_r", s.alpha_r},
                      {"n_st", s.n_st},
                      {"n_rt", s.n_rt},
                      {"mode", ToString(s.mode)}};
}

SbrtConfig SbrtConfigFromJson(const ordered_json& j) {
  SbrtConfig s;
  s.alpha_r = j.at("alpha_r").get<double>();
  s.n_st = j.at("n_st").get<int>();
  s.n_rt = j.at("n_rt").get<int>();
  s.mode = SbrtModeFromString(j.at("mode").get<std::string>());
  return s;
}

}  // namespace

Framework FrameworkFromString(const std::string& name) {
  if (name == "iql") return Framework::kIql;
  if (name == "vdn") return Framework::kVdn;
  if (name == "sad") return Framework::kSad;
  throw ConfigError("unknown framework: " + name);
}

std::string ToString(Framework framework) {
  switch (framework) {
    case Framework::kIql:
      return "iql";
    case Framework::kVdn:
      return "vdn";
    case Framework::kSad:
      return "sad";
  }
  throw ContractError("invalid framework tag");
}

double QFunction::Get(const ObsKey& key, int action_index) const {
  const auto it = rows_.find(key);
  if (it == rows_.end()) return default_value_;
  return it->second.written[action_index] ? it->second.values[action_index]
                                          : default_value_;
}

void QFunction::Set(const ObsKey& key, int action_index, double value) {
  if (!std::isfinite(value))
    throw NumericError("non-finite Q value written");
  Row& row = rows_[key];
  if (row.values.empty()) {
    row.values.assign(num_actions_, default_value_);
    row.written.assign(num_actions_, false);
  }
  row.values[action_index] = value;
  row.written[action_index] = true;
}

double QFunction::MaxOver(const ObsKey& key,
                          const std::vector<int>& legal_indices) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int idx : legal_indices) best = std::max(best, Get(key, idx));
  return best;
}

std::vector<std::tuple<std::string, int, double>> QFunction::SortedEntries()
    const {
  std::vector<std::tuple<std::string, int, double>> entries;
  for (const auto& [key, row] : rows_) {
    const std::string hex = ToHex(key);
    for (int a = 0; a < num_actions_; ++a) {
      if (!row.written[a]) continue;
      if (!std::isfinite(row.values[a]))
        throw NumericError("non-finite Q entry in table");
      entries.emplace_back(hex, a, row.values[a]);
    }
  }
  std::sort(entries.begin(), entries.end());
  return entries;
}

int TrainConfig::EffectiveDecayEpochs() const {
  if (epsilon_decay_epochs > 0) return epsilon_decay_epochs;
  return std::max(1, (epochs * 8) / 10);
}

double TrainConfig::EpsilonForEpoch(int epoch) const {
  const double frac =
      std::min(1.0, static_cast<double>(epoch) / EffectiveDecayEpochs());
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void TrainConfig::Validate() const {
  if (episodes_per_epoch < 1)
    throw ConfigError("episodes_per_epoch must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ConfigError("learning_rate must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("gamma must lie in [0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
      !(epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw ConfigError("epsilon bounds must lie in [0, 1]");
  if (epsilon_end > epsilon_start)
    throw ConfigError("epsilon_end must not exceed epsilon_start");
  if (epsilon_decay_epochs < 0)
    throw ConfigError("epsilon_decay_epochs must be >= 0");
}

void SbrtConfig::Validate(int total_epochs) const {
  if (!(alpha_r >= 0.0 && alpha_r <= 1.0))
    throw ConfigError("alpha_r must lie in [0, 1]");
  if (n_st < 0 || n_rt < 0) throw ConfigError("n_st/n_rt must be >= 0");
  if (n_st + n_rt != total_epochs)
    throw ConfigError("n_st + n_rt must equal the total training epochs");
}

SbrtConfig::Mode SbrtModeFromString(const std::string& name) {
  if (name == "worst") return SbrtConfig::Mode::kWorst;
  if (name == "best") return SbrtConfig::Mode::kBest;
  if (name == "random") return SbrtConfig::Mode::kRandom;
  throw ConfigError("unknown SBRT mode: " + name);
}

std::string ToString(SbrtConfig::Mode mode) {
  switch (mode) {
    case SbrtConfig::Mode::kWorst:
      return "worst";
    case SbrtConfig::Mode::kBest:
      return "best";
    case SbrtConfig::Mode::kRandom:
      return "random";
  }
  throw ContractError("invalid SBRT mode");
}

std::string ModelRecord::SaveToString(bool include_sbrt) const {
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["framework"] = ToString(framework);
  doc["seed"] = seed;
  doc["game_config"] = GameConfigToJson(game_config);
  doc["train_config"] = TrainConfigToJson(train_config);
  if (sbrt_config.has_value() && include_sbrt)
    doc["sbrt_config"] = SbrtConfigToJson(*sbrt_config);
  ordered_json qdoc;
  qdoc["default_value"] = q.default_value();
  qdoc["abstraction_level"] = ToString(q.level());
  qdoc["num_actions"] = q.num_actions();
  ordered_json entries = ordered_json::array();
  for (const auto& [hex, action, value] : q.SortedEntries())
    entries.push_back(ordered_json::array({hex, action, value}));
  qdoc["entries"] = std::move(entries);
  doc["q"] = std::move(qdoc);
  return doc.dump() + "\n";
}

void ModelRecord::SaveToFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << SaveToString();
  if (!out) throw IoError("write failed: " + path);
}

ModelRecord ModelRecord::LoadFromString(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion)
      throw ConfigError("unsupported model format_version");
    ModelRecord m;
    m.framework = FrameworkFromString(doc.at("framework").get<std::string>());
    m.seed = doc.at("seed").get<uint64_t>();
    m.game_config = GameConfigFromJson(doc.at("game_config"));
    m.train_config = TrainConfigFromJson(doc.at("train_config"));
    if (doc.contains("sbrt_config"))
      m.sbrt_config = SbrtConfigFromJson(doc.at("sbrt_config"));
    const ordered_json& qdoc = doc.at("q");
    m.q = QFunction(qdoc.at("num_actions").get<int>(),
                    qdoc.at("default_value").get<double>(),
                    AbstractionLevelFromString(
                        qdoc.at("abstraction_level").get<std::string>()));
    for (const auto& entry : qdoc.at("entries")) {
      m.q.Set(FromHex(entry.at(0).get<std::string>()), entry.at(1).get<int>(),
              entry.at(2).get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
}

ModelRecord ModelRecord::LoadFromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return LoadFromString(buffer.str());
}

Action GreedyAction(const QFunction& q, const GameConfig& config,
                    const ObsKey& key, const std::vector<Action>& legal) {
  if (legal.empty()) throw ContractError("greedy_action on empty legal set");
  const Action* best = &legal[0];
  double best_value = q.Get(key, ActionIndex(config, legal[0]));
  for (size_t i = 1; i < legal.size(); ++i) {
    const double v = q.Get(key, ActionIndex(config, legal[i]));
    if (v > best_value) {
      best_value = v;
      best = &legal[i];
    }
  }
  return *best;
}

Action EpsilonGreedy(const QFunction& q, const GameConfig& config,
                     const ObsKey& key, const std::vector<Action>& legal,
                     double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ContractError("epsilon must lie in [0, 1]");
  // Draw order: one Bernoulli, then one bounded uniform on the explore
  // branch only.
  if (rng.NextBernoulli(epsilon))
    return legal[rng.NextBounded(legal.size())];
  return GreedyAction(q, config, key, legal);
}

void TdUpdateIql(QFunction& q, const Transition& t, double learning_rate) {
  if (!std::isfinite(t.reward) || !std::isfinite(t.gamma_elapsed))
    throw NumericError("non-finite transition input");
  double target = t.reward;
  if (t.next_key.has_value())
    target += t.gamma_elapsed * q.MaxOver(*t.next_key, t.next_legal_indices);
  const double old_value = q.Get(t.key, t.action_index);
  q.Set(t.key, t.action_index,
        old_value + learning_rate * (target - old_value));
}

void TdUpdateVdn(QFunction& q, const RoundTransition& t,
                 double learning_rate) {
  if (!std::isfinite(t.reward) || !std::isfinite(t.gamma_round))
    throw NumericError("non-finite round transition input");
  if (t.steps.empty() || t.steps.size() > 2)
    throw ContractError("round must contain one or two seat steps");
  double joint = 0.0;
  for (const auto& step : t.steps) joint += q.Get(step.key, step.action_index);
  double next_value = 0.0;
  for (size_t i = 0; i < t.next_keys.size(); ++i) {
    if (t.next_keys[i].has_value())
      next_value += q.MaxOver(*t.next_keys[i], t.next_legal_indices[i]);
  }
  const double delta = t.reward + t.gamma_round * next_value - joint;
  // Full TD error on each addend (standard sum-decomposition gradient).
  for (const auto& step : t.steps) {
    q.Set(step.key, step.action_index,
          q.Get(step.key, step.action_index) + learning_rate * delta);
  }
}

Observation SadAugment(const Observation& obs, const Action& greedy,
                       const Action& executed) {
  Observation out = obs;
  out.sad_hint = (executed == greedy) ? executed : greedy;
  return out;
}

namespace {

// One seat's in-flight transition between its consecutive decisions.
struct PendingStep {
  ObsKey key;
  int action_index = 0;
  double reward = 0.0;
  double gamma_pow = 1.0;
};

// A completed VDN round waiting for both seats' next decision keys.
struct PendingRound {
  RoundTransition round;
  bool have_next[kNumSeats] = {false, false};
};

void RunEpisode(QFunction& q, const GameConfig& game_config,
                const TrainConfig& train, double epsilon, bool robust,
                const std::optional<SbrtConfig>& sbrt, uint64_t episode_index) {
  const Framework fw = train.framework;
  const SadChannel sad = fw == Framework::kSad ? SadChannel::kOn
                                               : SadChannel::kOff;
  const uint64_t seed = train.seed;
  GameState state =
      NewGame(game_config, DeriveSeed(seed, "deal", episode_index));
  Rng explore(DeriveSeed(seed, "explore", episode_index));
  Rng perturb_rng(DeriveSeed(seed, "perturb", episode_index));

  std::optional<PendingStep> pending[kNumSeats];
  std::optional<PendingRound> awaiting_round;
  RoundTransition current_round;
  std::optional<Action> last_greedy;
  std::optional<Action> last_executed;

  while (!state.terminal) {
    const int seat = state.active_seat;
    Observation obs = Observe(state, seat);
    if (fw == Framework::kSad && last_greedy.has_value())
      obs = SadAugment(obs, *last_greedy, *last_executed);
    const ObsKey key = EncodeObservation(obs, train.level, sad);
    const std::vector<Action> legal = LegalActions(state, seat);
    const std::vector<int> legal_indices = LegalIndices(game_config, legal);

    if (fw == Framework::kVdn) {
      if (awaiting_round.has_value() && !awaiting_round->have_next[seat]) {
        awaiting_round->round.next_keys[seat] = key;
        awaiting_round->round.next_legal_indices[seat] = legal_indices;
        awaiting_round->have_next[seat] = true;
        if (awaiting_round->have_next[0] && awaiting_round->have_next[1]) {
          TdUpdateVdn(q, awaiting_round->round, train.learning_rate);
          awaiting_round.reset();
        }
      }
    } else if (pending[seat].has_value()) {
      TdUpdateIql(q,
                  Transition{pending[seat]->key, pending[seat]->action_index,
                             pending[seat]->reward, pending[seat]->gamma_pow,
                             key, legal_indices},
                  train.learning_rate);
      pending[seat].reset();
    }

    const Action greedy = GreedyAction(q, game_config, key, legal);
    Action executed = EpsilonGreedy(q, game_config, key, legal, epsilon,
                                    explore);
    if (robust) {
      executed = Perturb(q, game_config, key, legal, executed, sbrt->alpha_r,
                         sbrt->mode, perturb_rng)
                     .executed;
    }
    const int executed_index = ActionIndex(game_config, executed);

    StepResult result = Step(state, executed);

    if (fw == Framework::kVdn) {
      current_round.steps.push_back({key, executed_index});
      current_round.reward += current_round.gamma_round * result.reward;
      current_round.gamma_round *= train.gamma;
      if (current_round.steps.size() == 2 || result.terminal) {
        if (awaiting_round.has_value()) {
          // Terminal arrived before both next keys; bootstrap the missing
          // seat with 0.
          TdUpdateVdn(q, awaiting_round->round, train.learning_rate);
          awaiting_round.reset();
        }
        PendingRound completed;
        completed.round = std::move(current_round);
        completed.round.next_keys.assign(kNumSeats, std::nullopt);
        completed.round.next_legal_indices.assign(kNumSeats, {});
        awaiting_round = std::move(completed);
        current_round = RoundTransition{};
      }
    } else {
      pending[seat] = PendingStep{key, executed_index, 0.0, 1.0};
      for (auto& p : pending) {
        if (p.has_value()) {
          p->reward += p->gamma_pow * result.reward;
          p->gamma_pow *= train.gamma;
        }
      }
    }

    last_greedy = greedy;
    last_executed = executed;
    state = std::move(result.state);
  }

  // Terminal flush: remaining transitions bootstrap with 0.
  if (fw == Framework::kVdn) {
    if (awaiting_round.has_value())
      TdUpdateVdn(q, awaiting_round->round, train.learning_rate);
  } else {
    for (int seat = 0; seat < kNumSeats; ++seat) {
      if (pending[seat].has_value()) {
        TdUpdateIql(q,
                    Transition{pending[seat]->key,
                               pending[seat]->action_index,
                               pending[seat]->reward,
                               pending[seat]->gamma_pow, std::nullopt, {}},
                    train.learning_rate);
      }
    }
  }
}

}  // namespace

ModelRecord TrainModel(const GameConfig& game_config,
                       const TrainConfig& train_config,
                       const std::optional<SbrtConfig>& sbrt) {
  game_config.Validate();
  train_config.Validate();
  if (sbrt.has_value()) sbrt->Validate(train_config.epochs);

  ModelRecord model;
  model.q = QFunction(game_config.NumActions(), 0.0, train_config.level);
  model.game_config = game_config;
  model.train_config = train_config;
  model.sbrt_config = sbrt;
  model.framework = train_config.framework;
  model.seed = train_config.seed;

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    const double epsilon = train_config.EpsilonForEpoch(epoch);
    const bool robust = sbrt.has_value() && epoch >= sbrt->n_st;
    for (int ep = 0; ep < train_config.episodes_per_epoch; ++ep) {
      const uint64_t episode_index =
          static_cast<uint64_t>(epoch) * train_config.episodes_per_epoch + ep;
      RunEpisode(model.q, game_config, train_config, epsilon, robust, sbrt,
                 episode_index);
    }
  }
  return model;
}

ModelRecord TrainSelfplay(const GameConfig& game_config,
                          const TrainConfig& train_config) {
  return TrainModel(game_config, train_config, std::nullopt);
}

}  // namespace zsc_lab
