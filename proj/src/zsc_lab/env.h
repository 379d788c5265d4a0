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
// Two-player cooperative Hanabi-family card game. The rules engine is a pure
// value-semantics state machine: every operation either inspects a GameState
// or returns a transformed copy, so independent games can run on any number
// of threads with no synchronization.

#ifndef ZSC_LAB_ENV_H_
#define ZSC_LAB_ENV_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zsc_lab {

inline constexpr int kNumSeats = 2;

// Rules parameterization. `seed` is provenance (the deal seed an experiment
// associates with this instance); NewGame takes the actual deal seed.
struct GameConfig {
  int colors = 5;
  int ranks = 5;
  std::vector<int> multiplicity = {3, 2, 2, 2, 1};  // copies per rank
  int hand_size = 5;
  int info_tokens_max = 8;
  int life_tokens_max = 3;
  uint64_t seed = 0;

  int DeckSize() const;
  int MaxScore() const { return colors * ranks; }
  // Total number of distinct actions: Play/Discard per slot, one hint per
  // color, one hint per rank.
  int NumActions() const { return 2 * hand_size + colors + ranks; }

  bool SameRules(const GameConfig& other) const;

  // Throws ConfigError if any invariant fails (deck must cover two hands,
  // counts positive, multiplicity length == ranks).
  void Validate() const;
};

// Named presets: "hanabi-full", "hanabi-small", "hanabi-oracle".
GameConfig PresetByName(const std::string& name);

struct Card {
  int8_t color = 0;
  int8_t rank = 0;  // 1-based

  friend bool operator==(const Card&, const Card&) = default;
};

// What hints have revealed about one hand slot. -1 means unknown.
struct CardKnowledge {
  int8_t color = -1;
  int8_t rank = -1;

  friend bool operator==(const CardKnowledge&, const CardKnowledge&) = default;
};

struct Action {
  enum Type : int8_t { kPlay = 0, kDiscard = 1, kHintColor = 2, kHintRank = 3 };

  Type type = kPlay;
  int8_t value = 0;  // slot for Play/Discard, color for HintColor, rank for
                     // HintRank (1-based)

  friend bool operator==(const Action&, const Action&) = default;

  std::string ToString() const;
};

// Fixed total order over the action space of a config: Play slots ascending,
// Discard slots ascending, hint colors ascending, hint ranks ascending.
// Legal-action lists and argmax tie-breaks follow this order.
int ActionIndex(const GameConfig& config, const Action& action);
Action ActionFromIndex(const GameConfig& config, int index);

// Public record of the previous move, visible to both seats.
struct LastMove {
  int8_t actor = 0;
  Action action;
  // Identity of the played/discarded card (public once it leaves the hand).
  Card card;
  bool play_succeeded = false;
  // Bitmask of the hinted seat's slots matched by a hint.
  uint8_t touched_slots = 0;

  friend bool operator==(const LastMove&, const LastMove&) = default;
};

struct GameState {
  GameConfig config;
  std::vector<Card> deck;  // back of the vector is the next draw
  std::vector<Card> hands[kNumSeats];
  std::vector<CardKnowledge> knowledge[kNumSeats];
  std::vector<int8_t> fireworks;  // per color, current stack height
  std::vector<int16_t> discards;  // per (color, rank), discarded copies
  int info_tokens = 0;
  int life_tokens = 0;
  int active_seat = 0;
  int turn_index = 0;
  // Turns left once the deck has emptied; -1 while the deck still has cards.
  int final_countdown = -1;
  bool terminal = false;
  int score_at_termination = 0;
  std::optional<LastMove> last_move;

  int Score() const;
  int DiscardCount(int color, int rank) const {
    return discards[color * config.ranks + (rank - 1)];
  }

  // Canonical byte serialization; equal states serialize identically.
  std::string Serialize() const;
};

// One seat's partial view of the state. Never contains the viewer's own card
// identities.
struct Observation {
  int8_t viewer_seat = 0;
  std::vector<Card> partner_hand;
  std::vector<CardKnowledge> own_knowledge;
  std::vector<int8_t> fireworks;
  std::vector<int16_t> discards;  // per (color, rank)
  int info_tokens = 0;
  int life_tokens = 0;
  int deck_size = 0;
  std::optional<LastMove> last_move;
  // Greedy-action annotation used by SAD-style policies; set only while a
  // SAD rollout is feeding observations to a SAD policy.
  std::optional<Action> sad_hint;
};

// Key abstraction levels. FULL keeps every observation field; COMPACT drops
// per-color discard detail (keeps per-rank totals) and buckets deck_size into
// {0, 1-4, 5+}. COMPACT is the training default, FULL the evaluation-fidelity
// option.
enum class AbstractionLevel : uint8_t { kFull = 0, kCompact = 1 };

AbstractionLevel AbstractionLevelFromString(const std::string& name);
std::string ToString(AbstractionLevel level);

// Whether the key carries the SAD greedy-action channel. SAD and non-SAD keys
// can never collide because the channel flag is part of the encoding.
enum class SadChannel : uint8_t { kOff = 0, kOn = 1 };

using ObsKey = std::string;

// Byte-string encoding of an observation. Deterministic, total, and injective
// over the fields retained at `level`. Layout version 1:
//   [version][level][sad flag][viewer seat][info][life]
//   [deck field][fireworks...][discards...][partner hand][own knowledge]
//   [last move][sad hint]
ObsKey EncodeObservation(const Observation& obs, AbstractionLevel level,
                         SadChannel sad = SadChannel::kOff);

// Deals a fresh game: seeded shuffle, hand_size cards dealt alternately
// starting with seat 0, tokens at their maxima, seat 0 to move.
GameState NewGame(const GameConfig& config, uint64_t seed);

// Legal moves for the active seat, in the fixed action order. Discard is
// excluded at full info tokens; hints require a token and at least one
// matching card in the partner's hand.
std::vector<Action> LegalActions(const GameState& state, int seat);

struct StepResult {
  GameState state;
  double reward = 0.0;
  bool terminal = false;
};

// Applies one action. Successful play scores +1 (completing a color restores
// an info token); a misplay burns a life; bombing out on the last life ends
// the game with an extra -score so the episode total telescopes to zero.
StepResult Step(const GameState& state, const Action& action);

Observation Observe(const GameState& state, int seat);

}  // namespace zsc_lab

#endif  // ZSC_LAB_ENV_H_
