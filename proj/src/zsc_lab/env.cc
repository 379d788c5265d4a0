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

#include "zsc_lab/env.h"

#include <algorithm>
#include <numeric>

#include "zsc_lab/errors.h"
#include "zsc_lab/rng.h"

namespace zsc_lab {

namespace {

void AppendByte(std::string& out, int value) {
  out.push_back(static_cast<char>(static_cast<unsigned char>(value)));
}

void AppendU16(std::string& out, int value) {
  AppendByte(out, value & 0xff);
  AppendByte(out, (value >> 8) & 0xff);
}

}  // namespace

int GameConfig::DeckSize() const {
  return colors * std::accumulate(multiplicity.begin(), multiplicity.end(), 0);
}

bool GameConfig::SameRules(const GameConfig& other) const {
  return colors == other.colors && ranks == other.ranks &&
         multiplicity == other.multiplicity && hand_size == other.hand_size &&
         info_tokens_max == other.info_tokens_max &&
         life_tokens_max == other.life_tokens_max;
}

void GameConfig::Validate() const {
  if (colors < 1) throw ConfigError("colors must be >= 1");
  if (ranks < 1) throw ConfigError("ranks must be >= 1");
  if (static_cast<int>(multiplicity.size()) != ranks)
    throw ConfigError("multiplicity must list one copy count per rank");
  for (int m : multiplicity)
    if (m < 1) throw ConfigError("multiplicity entries must be >= 1");
  if (hand_size < 1) throw ConfigError("hand_size must be >= 1");
  if (info_tokens_max < 0) throw ConfigError("info_tokens_max must be >= 0");
  if (life_tokens_max < 1) throw ConfigError("life_tokens_max must be >= 1");
  if (DeckSize() < 2 * hand_size)
    throw ConfigError("deck too small: need at least two full hands");
}

GameConfig PresetByName(const std::string& name) {
  if (name == "hanabi-full") {
    return GameConfig{5, 5, {3, 2, 2, 2, 1}, 5, 8, 3, 0};
  }
  if (name == "hanabi-small") {
    return GameConfig{2, 5, {3, 2, 2, 2, 1}, 2, 3, 1, 0};
  }
  if (name == "hanabi-oracle") {
    return GameConfig{1, 2, {2, 2}, 1, 1, 1, 0};
  }
  throw ConfigError("unknown preset: " + name);
}

std::string Action::ToString() const {
  switch (type) {
    case kPlay:
      return "play:" + std::to_string(value);
    case kDiscard:
      return "discard:" + std::to_string(value);
    case kHintColor:
      return "hint-color:" + std::to_string(value);
    case kHintRank:
      return "hint-rank:" + std::to_string(value);
  }
  return "invalid";
}

int ActionIndex(const GameConfig& config, const Action& action) {
  switch (action.type) {
    case Action::kPlay:
      return action.value;
    case Action::kDiscard:
      return config.hand_size + action.value;
    case Action::kHintColor:
      return 2 * config.hand_size + action.value;
    case Action::kHintRank:
      return 2 * config.hand_size + config.colors + (action.value - 1);
  }
  throw ContractError("invalid action type");
}

Action ActionFromIndex(const GameConfig& config, int index) {
  if (index < 0 || index >= config.NumActions())
    throw ContractError("action index out of range");
  if (index < config.hand_size)
    return {Action::kPlay, static_cast<int8_t>(index)};
  index -= config.hand_size;
  if (index < config.hand_size)
    return {Action::kDiscard, static_cast<int8_t>(index)};
  index -= config.hand_size;
  if (index < config.colors)
    return {Action::kHintColor, static_cast<int8_t>(index)};
  index -= config.colors;
  return {Action::kHintRank, static_cast<int8_t>(index + 1)};
}

int GameState::Score() const {
  return std::accumulate(fireworks.begin(), fireworks.end(), 0);
}

std::string GameState::Serialize() const {
  std::string out;
  AppendByte(out, config.colors);
  AppendByte(out, config.ranks);
  for (int m : config.multiplicity) AppendByte(out, m);
  AppendByte(out, config.hand_size);
  AppendByte(out, config.info_tokens_max);
  AppendByte(out, config.life_tokens_max);
  AppendU16(out, static_cast<int>(deck.size()));
  for (const Card& c : deck) {
    AppendByte(out, c.color);
    AppendByte(out, c.rank);
  }
  for (int seat = 0; seat < kNumSeats; ++seat) {
    AppendByte(out, static_cast<int>(hands[seat].size()));
    for (const Card& c : hands[seat]) {
      AppendByte(out, c.color);
      AppendByte(out, c.rank);
    }
    for (const CardKnowledge& k : knowledge[seat]) {
      AppendByte(out, k.color + 1);
      AppendByte(out, k.rank + 1);
    }
  }
  for (int8_t f : fireworks) AppendByte(out, f);
  for (int16_t d : discards) AppendU16(out, d);
  AppendByte(out, info_tokens);
  AppendByte(out, life_tokens);
  AppendByte(out, active_seat);
  AppendU16(out, turn_index);
  AppendByte(out, final_countdown + 1);
  AppendByte(out, terminal ? 1 : 0);
  AppendU16(out, score_at_termination);
  if (last_move.has_value()) {
    AppendByte(out, 1);
    AppendByte(out, last_move->actor);
    AppendByte(out, ActionIndex(config, last_move->action));
    AppendByte(out, last_move->card.color);
    AppendByte(out, last_move->card.rank);
    AppendByte(out, last_move->play_succeeded ? 1 : 0);
    AppendByte(out, last_move->touched_slots);
  } else {
    AppendByte(out, 0);
  }
  return out;
}

AbstractionLevel AbstractionLevelFromString(const std::string& name) {
  if (name == "full") return AbstractionLevel::kFull;
  if (name == "compact") return AbstractionLevel::kCompact;
  throw ConfigError("unknown abstraction level: " + name);
}

std::string ToString(AbstractionLevel level) {
  return level == AbstractionLevel::kFull ? "full" : "compact";
}

ObsKey EncodeObservation(const Observation& obs, AbstractionLevel level,
                         SadChannel sad) {
  std::string key;
  key.reserve(48);
  AppendByte(key, 1);  // layout version
  AppendByte(key, static_cast<int>(level));
  AppendByte(key, static_cast<int>(sad));
  AppendByte(key, obs.viewer_seat);
  AppendByte(key, obs.info_tokens);
  AppendByte(key, obs.life_tokens);
  if (level == AbstractionLevel::kCompact) {
    // Deck size bucketed into {0, 1-4, 5+}.
    const int bucket = obs.deck_size == 0 ? 0 : (obs.deck_size <= 4 ? 1 : 2);
    AppendByte(key, bucket);
  } else {
    AppendU16(key, obs.deck_size);
  }
  AppendByte(key, static_cast<int>(obs.fireworks.size()));
  for (int8_t f : obs.fireworks) AppendByte(key, f);
  const int colors = static_cast<int>(obs.fireworks.size());
  const int ranks =
      colors == 0 ? 0 : static_cast<int>(obs.discards.size()) / colors;
  if (level == AbstractionLevel::kCompact) {
    // Per-rank discard totals only.
    AppendByte(key, ranks);
    for (int r = 0; r < ranks; ++r) {
      int total = 0;
      for (int c = 0; c < colors; ++c) total += obs.discards[c * ranks + r];
      AppendByte(key, total);
    }
  } else {
    AppendU16(key, static_cast<int>(obs.discards.size()));
    for (int16_t d : obs.discards) AppendByte(key, d);
  }
  AppendByte(key, static_cast<int>(obs.partner_hand.size()));
  for (const Card& c : obs.partner_hand) {
    AppendByte(key, c.color);
    AppendByte(key, c.rank);
  }
  AppendByte(key, static_cast<int>(obs.own_knowledge.size()));
  for (const CardKnowledge& k : obs.own_knowledge) {
    AppendByte(key, k.color + 1);
    AppendByte(key, k.rank + 1);
  }
  if (obs.last_move.has_value()) {
    AppendByte(key, 1);
    AppendByte(key, obs.last_move->actor == obs.viewer_seat ? 0 : 1);
    AppendByte(key, static_cast<int>(obs.last_move->action.type));
    AppendByte(key, obs.last_move->action.value);
    AppendByte(key, obs.last_move->card.color);
    AppendByte(key, obs.last_move->card.rank);
    AppendByte(key, obs.last_move->play_succeeded ? 1 : 0);
    AppendByte(key, obs.last_move->touched_slots);
  } else {
    AppendByte(key, 0);
  }
  if (sad == SadChannel::kOn) {
    if (obs.sad_hint.has_value()) {
      AppendByte(key, 1);
      AppendByte(key, static_cast<int>(obs.sad_hint->type));
      AppendByte(key, obs.sad_hint->value);
    } else {
      AppendByte(key, 0);
    }
  }
  return key;
}

GameState NewGame(const GameConfig& config, uint64_t seed) {
  config.Validate();
  GameState state;
  state.config = config;
  for (int c = 0; c < config.colors; ++c) {
    for (int r = 1; r <= config.ranks; ++r) {
      for (int copy = 0; copy < config.multiplicity[r - 1]; ++copy) {
        state.deck.push_back(
            {static_cast<int8_t>(c), static_cast<int8_t>(r)});
      }
    }
  }
  Rng rng(DeriveSeed(seed, "deck-shuffle", 0));
  for (int i = static_cast<int>(state.deck.size()) - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.NextBounded(i + 1));
    std::swap(state.deck[i], state.deck[j]);
  }
  // Alternating deal, seat 0 first; draws come off the back.
  for (int i = 0; i < config.hand_size; ++i) {
    for (int seat = 0; seat < kNumSeats; ++seat) {
      state.hands[seat].push_back(state.deck.back());
      state.deck.pop_back();
      state.knowledge[seat].push_back(CardKnowledge{});
    }
  }
  state.fireworks.assign(config.colors, 0);
  state.discards.assign(config.colors * config.ranks, 0);
  state.info_tokens = config.info_tokens_max;
  state.life_tokens = config.life_tokens_max;
  if (state.deck.empty()) state.final_countdown = kNumSeats;
  return state;
}

std::vector<Action> LegalActions(const GameState& state, int seat) {
  if (state.terminal) throw ContractError("legal_actions on terminal state");
  if (seat != state.active_seat)
    throw ContractError("legal_actions for inactive seat");
  const GameConfig& cfg = state.config;
  std::vector<Action> legal;
  const int slots = static_cast<int>(state.hands[seat].size());
  for (int s = 0; s < slots; ++s)
    legal.push_back({Action::kPlay, static_cast<int8_t>(s)});
  if (state.info_tokens < cfg.info_tokens_max) {
    for (int s = 0; s < slots; ++s)
      legal.push_back({Action::kDiscard, static_cast<int8_t>(s)});
  }
  if (state.info_tokens > 0) {
    const std::vector<Card>& partner = state.hands[1 - seat];
    for (int c = 0; c < cfg.colors; ++c) {
      const bool match = std::any_of(partner.begin(), partner.end(),
                                     [c](const Card& card) {
                                       return card.color == c;
                                     });
      if (match) legal.push_back({Action::kHintColor, static_cast<int8_t>(c)});
    }
    for (int r = 1; r <= cfg.ranks; ++r) {
      const bool match = std::any_of(partner.begin(), partner.end(),
                                     [r](const Card& card) {
                                       return card.rank == r;
                                     });
      if (match) legal.push_back({Action::kHintRank, static_cast<int8_t>(r)});
    }
  }
  return legal;
}

StepResult Step(const GameState& state, const Action& action) {
  const std::vector<Action> legal = LegalActions(state, state.active_seat);
  if (std::find(legal.begin(), legal.end(), action) == legal.end())
    throw ContractError("illegal action: " + action.ToString());

  GameState next = state;
  const GameConfig& cfg = next.config;
  const int seat = next.active_seat;
  double reward = 0.0;
  LastMove move;
  move.actor = static_cast<int8_t>(seat);
  move.action = action;

  auto remove_and_draw = [&next, seat](int slot) {
    next.hands[seat].erase(next.hands[seat].begin() + slot);
    next.knowledge[seat].erase(next.knowledge[seat].begin() + slot);
    if (!next.deck.empty()) {
      next.hands[seat].push_back(next.deck.back());
      next.deck.pop_back();
      next.knowledge[seat].push_back(CardKnowledge{});
    }
  };

  switch (action.type) {
    case Action::kPlay: {
      const Card card = next.hands[seat][action.value];
      move.card = card;
      if (card.rank == next.fireworks[card.color] + 1) {
        next.fireworks[card.color] = card.rank;
        move.play_succeeded = true;
        reward = 1.0;
        if (card.rank == cfg.ranks)
          next.info_tokens = std::min(next.info_tokens + 1,
                                      cfg.info_tokens_max);
      } else {
        next.life_tokens -= 1;
        next.discards[card.color * cfg.ranks + (card.rank - 1)] += 1;
      }
      remove_and_draw(action.value);
      break;
    }
    case Action::kDiscard: {
      const Card card = next.hands[seat][action.value];
      move.card = card;
      next.discards[card.color * cfg.ranks + (card.rank - 1)] += 1;
      next.info_tokens = std::min(next.info_tokens + 1, cfg.info_tokens_max);
      remove_and_draw(action.value);
      break;
    }
    case Action::kHintColor:
    case Action::kHintRank: {
      next.info_tokens -= 1;
      const int target = 1 - seat;
      for (size_t s = 0; s < next.hands[target].size(); ++s) {
        const Card& card = next.hands[target][s];
        const bool match = action.type == Action::kHintColor
                               ? card.color == action.value
                               : card.rank == action.value;
        if (match) {
          move.touched_slots |= static_cast<uint8_t>(1u << s);
          if (action.type == Action::kHintColor)
            next.knowledge[target][s].color = action.value;
          else
            next.knowledge[target][s].rank = action.value;
        }
      }
      break;
    }
  }

  next.last_move = move;
  next.turn_index += 1;
  next.active_seat = 1 - seat;

  // Endgame bookkeeping: a final-window turn was just consumed; drawing the
  // last card opens the window.
  if (next.final_countdown > 0) next.final_countdown -= 1;
  if (next.deck.empty() && next.final_countdown < 0)
    next.final_countdown = kNumSeats;

  const int score = next.Score();
  const bool all_complete = score == cfg.MaxScore();
  if (next.life_tokens == 0) {
    // Bomb-out zeroes the episode: take back everything scored so far.
    reward -= score;
    next.terminal = true;
    next.score_at_termination = 0;
  } else if (all_complete || next.final_countdown == 0) {
    next.terminal = true;
    next.score_at_termination = score;
  }

  const bool terminal = next.terminal;
  return {std::move(next), reward, terminal};
}

Observation Observe(const GameState& state, int seat) {
  Observation obs;
  obs.viewer_seat = static_cast<int8_t>(seat);
  obs.partner_hand = state.hands[1 - seat];
  obs.own_knowledge = state.knowledge[seat];
  obs.fireworks = state.fireworks;
  obs.discards = state.discards;
  obs.info_tokens = state.info_tokens;
  obs.life_tokens = state.life_tokens;
  obs.deck_size = static_cast<int>(state.deck.size());
  obs.last_move = state.last_move;
  return obs;
}

}  // namespace zsc_lab
