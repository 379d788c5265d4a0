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
// Acceptance suite: every release-gating property of the laboratory, one
// printed pass/fail line per criterion. Oracles here are independent
// re-implementations (exhaustive enumeration, closed forms), never the code
// under test.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "zsc_lab/analysis.h"
#include "zsc_lab/crossplay.h"
#include "zsc_lab/env.h"
#include "zsc_lab/errors.h"
#include "zsc_lab/experiment.h"
#include "zsc_lab/policy.h"
#include "zsc_lab/qlearn.h"
#include "zsc_lab/rng.h"
#include "zsc_lab/sbrt.h"
#include "zsc_lab/similarity.h"
#include "zsc_lab/util.h"

using namespace zsc_lab;
namespace fs = std::filesystem;

namespace {

void Verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s - %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// Enumeration helpers for the tiny preset.

// Independent re-implementation of dealing (back of deck = next draw, cards
// dealt alternately from seat 0) so the oracles do not depend on NewGame.
GameState DealFromDeck(const GameConfig& config, std::vector<Card> deck) {
  GameState s;
  s.config = config;
  s.deck = std::move(deck);
  for (int i = 0; i < config.hand_size; ++i) {
    for (int seat = 0; seat < kNumSeats; ++seat) {
      s.hands[seat].push_back(s.deck.back());
      s.deck.pop_back();
      s.knowledge[seat].push_back(CardKnowledge{});
    }
  }
  s.fireworks.assign(config.colors, 0);
  s.discards.assign(config.colors * config.ranks, 0);
  s.info_tokens = config.info_tokens_max;
  s.life_tokens = config.life_tokens_max;
  return s;
}

bool CardLess(const Card& a, const Card& b) {
  return std::tie(a.color, a.rank) < std::tie(b.color, b.rank);
}

// All distinct deck orders of a config, each equally likely under a uniform
// shuffle of the card objects.
std::vector<std::vector<Card>> AllDeckOrders(const GameConfig& config) {
  std::vector<Card> cards;
  for (int c = 0; c < config.colors; ++c)
    for (int r = 1; r <= config.ranks; ++r)
      for (int m = 0; m < config.multiplicity[r - 1]; ++m)
        cards.push_back(Card{static_cast<int8_t>(c), static_cast<int8_t>(r)});
  std::sort(cards.begin(), cards.end(), CardLess);
  std::vector<std::vector<Card>> orders;
  do {
    orders.push_back(cards);
  } while (std::next_permutation(cards.begin(), cards.end(), CardLess));
  return orders;
}

// ---------------------------------------------------------------------------
// Criterion 6 oracle: the best expected greedy self-play score achievable by
// any deterministic shared policy (a key -> action map), found by
// backtracking over assignments at the keys actually reached. Branch and
// bound keeps the search tractable on the tiny preset.

struct PolicySearch {
  const GameConfig& config;
  const std::vector<std::vector<Card>>& deals;
  AbstractionLevel level;
  std::map<ObsKey, Action> assign;
  double best = -1.0;
  int64_t nodes = 0;

  // Plays deal d under the current partial assignment. Returns the score, or
  // the blocking (key, legal set) when an unassigned key is reached.
  struct Outcome {
    bool complete = false;
    int score = 0;
    ObsKey key;
    std::vector<Action> legal;
  };

  Outcome PlayDeal(size_t d) {
    GameState s = DealFromDeck(config, deals[d]);
    while (!s.terminal) {
      const std::vector<Action> legal = LegalActions(s, s.active_seat);
      const ObsKey key =
          EncodeObservation(Observe(s, s.active_seat), level);
      const auto it = assign.find(key);
      if (it == assign.end()) return {false, 0, key, legal};
      s = Step(s, it->second).state;
    }
    return {true, s.score_at_termination, {}, {}};
  }

  void Search(size_t first_deal, int score_so_far) {
    if (++nodes > 50'000'000)
      throw NumericError("policy search exceeded its node budget");
    const int max_per_deal = config.MaxScore();
    for (size_t d = first_deal; d < deals.size(); ++d) {
      const Outcome out = PlayDeal(d);
      if (!out.complete) {
        // Bound: even perfect scores on the open deals cannot beat `best`.
        const int open = static_cast<int>(deals.size() - d);
        if (score_so_far + open * max_per_deal <=
            best * static_cast<double>(deals.size()))
          return;
        for (const Action& a : out.legal) {
          assign[out.key] = a;
          Search(d, score_so_far);
          assign.erase(out.key);
        }
        return;
      }
      score_so_far += out.score;
    }
    best = std::max(best,
                    score_so_far / static_cast<double>(deals.size()));
  }
};

double OptimalGreedyScore(const GameConfig& config, AbstractionLevel level) {
  const std::vector<std::vector<Card>> deals = AllDeckOrders(config);
  PolicySearch search{config, deals, level};
  search.Search(0, 0);
  return search.best;
}

// Exact mean greedy self-play score of a model over every deal.
double ExactSelfplayScore(const ModelRecord& model) {
  const std::vector<std::vector<Card>> deals =
      AllDeckOrders(model.game_config);
  const GreedyModelPolicy policy(model);
  int total = 0;
  for (const std::vector<Card>& deal : deals) {
    GameState s = DealFromDeck(model.game_config, deal);
    while (!s.terminal) {
      const std::vector<Action> legal = LegalActions(s, s.active_seat);
      Observation obs = Observe(s, s.active_seat);
      if (s.last_move) obs.sad_hint = s.last_move->action;
      s = Step(s, policy.Act(obs, legal)).state;
    }
    total += s.score_at_termination;
  }
  return total / static_cast<double>(deals.size());
}

// ---------------------------------------------------------------------------
// Scripted policies for the CPSTT estimator oracle.

class PlayFirst : public Policy {
 public:
  Action Act(const Observation&, const std::vector<Action>& legal)
      const override {
    return legal.front();
  }
};

class HintFirst : public Policy {
 public:
  Action Act(const Observation&, const std::vector<Action>& legal)
      const override {
    for (const Action& a : legal)
      if (a.type == Action::kHintColor || a.type == Action::kHintRank)
        return a;
    return legal.front();
  }
};

class LastLegal : public Policy {
 public:
  Action Act(const Observation&, const std::vector<Action>& legal)
      const override {
    return legal.back();
  }
};

// Exact CPSTT by enumerating every distinct deal.
double ExhaustiveCpstt(const GameConfig& config, const Policy& pi,
                       const Policy& pi1, const Policy& pi2) {
  int64_t matches = 0, decisions = 0;
  for (const std::vector<Card>& deal : AllDeckOrders(config)) {
    GameState s = DealFromDeck(config, deal);
    while (!s.terminal) {
      const std::vector<Action> legal = LegalActions(s, s.active_seat);
      Observation obs = Observe(s, s.active_seat);
      if (s.last_move) obs.sad_hint = s.last_move->action;
      Action chosen;
      if (s.active_seat == 0) {
        chosen = pi.Act(obs, legal);
      } else {
        chosen = pi1.Act(obs, legal);
        decisions += 1;
        matches += pi2.Act(obs, legal) == chosen;
      }
      s = Step(s, chosen).state;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(decisions);
}

// ---------------------------------------------------------------------------
// Reference pools shared by criteria 7 and 8. Parameters mirror
// experiments/reference.json; see that file for the documented seeds.

TrainConfig ReferenceTrain(uint64_t seed) {
  TrainConfig t;
  t.framework = Framework::kIql;
  t.episodes_per_epoch = 1000;
  t.epochs = 300;
  t.learning_rate = 0.1;
  t.gamma = 0.99;
  t.epsilon_start = 1.0;
  t.epsilon_end = 0.05;
  t.seed = seed;
  return t;
}

const std::vector<ModelRecord>& IqlPool() {
  static const std::vector<ModelRecord>* pool = [] {
    const GameConfig game = PresetByName("hanabi-small");
    auto* models = new std::vector<ModelRecord>();
    models->resize(8);
    ParallelFor(8, 8, [&](int64_t i) {
      (*models)[static_cast<size_t>(i)] =
          TrainSelfplay(game, ReferenceTrain(static_cast<uint64_t>(i + 1)));
    });
    return models;
  }();
  return *pool;
}

const std::vector<ModelRecord>& SbrtPool() {
  static const std::vector<ModelRecord>* pool = [] {
    const GameConfig game = PresetByName("hanabi-small");
    SbrtConfig sbrt;
    sbrt.alpha_r = 0.8;
    sbrt.n_st = 240;
    sbrt.n_rt = 60;
    sbrt.mode = SbrtConfig::Mode::kRandom;
    auto* models = new std::vector<ModelRecord>();
    models->resize(8);
    ParallelFor(8, 8, [&](int64_t i) {
      (*models)[static_cast<size_t>(i)] = TrainSbrt(
          game, ReferenceTrain(static_cast<uint64_t>(i + 1)), sbrt);
    });
    return models;
  }();
  return *pool;
}

std::vector<PoolEntry> Entries(const std::vector<ModelRecord>& models,
                               const std::string& prefix) {
  std::vector<PoolEntry> pool;
  for (size_t i = 0; i < models.size(); ++i)
    pool.push_back({prefix + std::to_string(i + 1), &models[i]});
  return pool;
}

}  // namespace

TEST_CASE("criterion 1: boundary equivalence of robust training") {
  const GameConfig game = PresetByName("hanabi-oracle");
  TrainConfig t;
  t.episodes_per_epoch = 200;
  t.epochs = 10;
  t.seed = 42;
  const std::string baseline = TrainSelfplay(game, t).SaveToString(false);

  SbrtConfig alpha_one;
  alpha_one.alpha_r = 1.0;
  alpha_one.n_st = 8;
  alpha_one.n_rt = 2;
  const bool alpha_ok =
      TrainSbrt(game, t, alpha_one).SaveToString(false) == baseline;

  SbrtConfig no_robust;
  no_robust.alpha_r = 0.5;
  no_robust.n_st = 10;
  no_robust.n_rt = 0;
  const bool nrt_ok =
      TrainSbrt(game, t, no_robust).SaveToString(false) == baseline;

  Verdict(1, alpha_ok && nrt_ok,
          "alpha_r=1 and n_rt=0 both reproduce baseline training "
          "byte-identically");
  CHECK(alpha_ok);
  CHECK(nrt_ok);
}

TEST_CASE("criterion 2: perturbation rate sits in the binomial band") {
  const GameConfig cfg = PresetByName("hanabi-small");
  QFunction q(cfg.NumActions(), 0.0, AbstractionLevel::kCompact);
  const std::vector<Action> legal = {{Action::kPlay, 0},
                                     {Action::kPlay, 1},
                                     {Action::kHintRank, 1}};
  const int n = 200000;
  const double alpha = 0.8;
  Rng rng(314);
  int perturbed = 0;
  for (int i = 0; i < n; ++i)
    perturbed += Perturb(q, cfg, "k", legal, legal[0], alpha,
                         SbrtConfig::Mode::kRandom, rng)
                     .perturbed;
  const double p = 1 - alpha;
  const double sigma = std::sqrt(n * p * (1 - p));
  const bool pass =
      perturbed > n * p - 3 * sigma && perturbed < n * p + 3 * sigma;
  Verdict(2, pass,
          "rate " + FormatSig6(perturbed / static_cast<double>(n)) +
              " over " + std::to_string(n) + " calls vs 0.2 +- 3 sigma");
  CHECK(pass);
}

TEST_CASE("criterion 3: cpstt estimator vs exhaustive enumeration") {
  const GameConfig cfg = PresetByName("hanabi-oracle");
  const LastLegal pi;
  const PlayFirst pi1;
  const HintFirst pi2;
  const double exact = ExhaustiveCpstt(cfg, pi, pi1, pi2);
  const SimilarityEstimate mc = EstimateCpstt(cfg, pi, pi1, pi2, 10000, 29);
  const bool close = std::abs(mc.value - exact) <= 0.02;
  const SimilarityEstimate self = EstimateCpstt(cfg, pi, pi1, pi1, 1000, 29);
  const bool reflexive = self.value == 1.0;
  Verdict(3, close && reflexive,
          "MC " + FormatSig6(mc.value) + " vs exact " + FormatSig6(exact) +
              " (+-0.02); reflexivity " + FormatSig6(self.value));
  CHECK(close);
  CHECK(reflexive);
}

TEST_CASE("criterion 4: pearson correctness") {
  auto make = [](const std::vector<std::pair<double, double>>& xy) {
    std::vector<ScatterPoint> pts;
    for (const auto& [x, y] : xy) {
      ScatterPoint p;
      p.x = x;
      p.y = y;
      pts.push_back(p);
    }
    return pts;
  };
  std::vector<std::pair<double, double>> up, affine;
  Rng rng(55);
  for (int i = 0; i < 25; ++i) up.push_back({0.04 * i, 3.0 * 0.04 * i - 1});
  const bool linear_ok =
      std::abs(PearsonR(make(up)) - 1.0) < 1e-12;

  std::vector<std::pair<double, double>> base;
  for (int i = 0; i < 50; ++i) {
    const double x = rng.NextDouble(), y = rng.NextDouble();
    base.push_back({x, y});
    affine.push_back({200.0 * x - 3.0, 0.01 * y + 9.0});
  }
  const bool affine_ok =
      std::abs(PearsonR(make(base)) - PearsonR(make(affine))) < 1e-9;

  std::vector<ScatterPoint> pts = make(base);
  const double r = PearsonR(pts);
  std::reverse(pts.begin(), pts.end());
  const bool perm_ok = PearsonR(pts) == r;

  Verdict(4, linear_ok && affine_ok && perm_ok,
          "linear +-1 within 1e-12, affine within 1e-9, permutation exact");
  CHECK(linear_ok);
  CHECK(affine_ok);
  CHECK(perm_ok);
}

TEST_CASE("criterion 5: environment invariants over 10000 episodes") {
  const GameConfig cfg = PresetByName("hanabi-small");
  auto initial_count = [&cfg] {
    std::map<std::pair<int, int>, int> count;
    for (int c = 0; c < cfg.colors; ++c)
      for (int r = 1; r <= cfg.ranks; ++r)
        count[{c, r}] = cfg.multiplicity[r - 1];
    return count;
  }();
  bool pass = true;
  for (uint64_t ep = 0; ep < 10000 && pass; ++ep) {
    GameState s = NewGame(cfg, DeriveSeed(8080, "acc-deal", ep));
    Rng rng(DeriveSeed(8081, "acc-policy", ep));
    double reward_sum = 0.0;
    while (!s.terminal) {
      const std::vector<Action> legal = LegalActions(s, s.active_seat);
      const StepResult r = Step(s, legal[rng.NextBounded(legal.size())]);
      reward_sum += r.reward;
      s = r.state;
      std::map<std::pair<int, int>, int> count;
      for (const Card& c : s.deck) count[{c.color, c.rank}] += 1;
      for (int seat = 0; seat < kNumSeats; ++seat)
        for (const Card& c : s.hands[seat]) count[{c.color, c.rank}] += 1;
      for (int c = 0; c < cfg.colors; ++c)
        for (int r2 = 1; r2 <= cfg.ranks; ++r2) {
          count[{c, r2}] += s.DiscardCount(c, r2);
          if (r2 <= s.fireworks[c]) count[{c, r2}] += 1;
        }
      pass = pass && count == initial_count;
      pass = pass && s.info_tokens >= 0 &&
             s.info_tokens <= cfg.info_tokens_max && s.life_tokens >= 0 &&
             s.life_tokens <= cfg.life_tokens_max;
    }
    const int expected = s.life_tokens == 0 ? 0 : s.score_at_termination;
    pass = pass && s.score_at_termination == expected &&
           std::abs(reward_sum - s.score_at_termination) < 1e-9;
  }
  Verdict(5, pass,
          "card conservation, token bounds and reward telescoping over "
          "10000 random hanabi-small episodes");
  CHECK(pass);
}

TEST_CASE("criterion 6: iql reaches the exhaustive-search optimum") {
  const GameConfig game = PresetByName("hanabi-oracle");
  const double optimum =
      OptimalGreedyScore(game, AbstractionLevel::kCompact);
  TrainConfig t;
  t.framework = Framework::kIql;
  t.episodes_per_epoch = 500;
  t.epochs = 30;
  t.seed = 1;
  const ModelRecord model = TrainSelfplay(game, t);
  const double learned = ExactSelfplayScore(model);
  const bool pass = learned >= optimum - 1e-9;
  Verdict(6, pass,
          "greedy self-play " + FormatSig6(learned) +
              " vs exhaustive policy-search optimum " + FormatSig6(optimum));
  CHECK(pass);
}

TEST_CASE("criterion 7: similarity predicts cross-play across iql seeds") {
  const std::vector<PoolEntry> pool = Entries(IqlPool(), "iql-s");
  const std::vector<CrossPlayCell> cells =
      CrossPlayMatrix(pool, 1000, 1, true, 1000, false, 8);
  const std::vector<ScatterPoint> points = ScatterFromCells(cells);
  double score_min = 0.0, score_max = 0.0;
  double cpstt_min = 1.0, cpstt_max = 0.0;
  for (const ScatterPoint& pt : points) {
    score_min = std::min(score_min, pt.y);
    score_max = std::max(score_max, pt.y);
    cpstt_min = std::min(cpstt_min, pt.x);
    cpstt_max = std::max(cpstt_max, pt.x);
  }
  const bool score_varies = score_max > score_min;
  if (!score_varies) {
    // Known-red outcome, kept failing on purpose: one-life bomb-outs zero
    // every greedy hanabi-small game at tabular desk scale, so all pair
    // means are 0 and r_p is undefined. See docs/notes for the analysis.
    Verdict(7, false,
            "r_p undefined: all " + std::to_string(points.size()) +
                " cross-play means are 0 (no bomb-free greedy game; cpstt "
                "spread " +
                FormatSig6(cpstt_min) + ".." + FormatSig6(cpstt_max) + ")");
    CHECK(score_varies);
    return;
  }
  const double r_p = PearsonR(points);
  const double p = PermutationPValue(points, 9999, 7);
  const bool pass = points.size() == 28 && r_p >= 0.4 && p < 0.05;
  Verdict(7, pass,
          "r_p = " + FormatSig6(r_p) + ", permutation p = " + FormatSig6(p) +
              " over " + std::to_string(points.size()) + " pairs");
  CHECK(points.size() == 28);
  CHECK(r_p >= 0.4);
  CHECK(p < 0.05);
}

TEST_CASE("criterion 8: robust training does not hurt intra cross-play") {
  const std::vector<PoolEntry> base = Entries(IqlPool(), "iql-s");
  const std::vector<PoolEntry> robust = Entries(SbrtPool(), "iql+sbrt-s");
  const ScoreStats base_intra = ZscAggregate(base, base, 1000, 1);
  const ScoreStats robust_intra = ZscAggregate(robust, robust, 1000, 1);
  const bool pass = robust_intra.mean >= base_intra.mean;
  std::string detail =
      "intra cross-play: iql+sbrt " + FormatSig6(robust_intra.mean) +
      " +- " + FormatSig6(robust_intra.std_err) + " vs iql " +
      FormatSig6(base_intra.mean) + " +- " + FormatSig6(base_intra.std_err);
  if (robust_intra.mean == 0.0 && base_intra.mean == 0.0)
    detail += " (degenerate margin: every game scores 0 at this scale)";
  Verdict(8, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 9: pipeline artifacts are jobs-invariant") {
  const fs::path root = fs::temp_directory_path() / "zsc_lab_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  auto config_for = [&root](const std::string& tag) {
    const std::string text = ReadFile(std::string(ZSC_LAB_SOURCE_DIR) +
                                      "/experiments/smoke.json");
    ExperimentConfig config = ExperimentConfig::FromJsonText(text);
    config.output_dir = (root / tag).string();
    return config;
  };
  RunExperiment(config_for("jobs1"), 1);
  RunExperiment(config_for("jobs8"), 8);
  bool pass = true;
  std::string mismatch;
  for (const auto& entry :
       fs::recursive_directory_iterator(root / "jobs1")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "jobs1");
    if (rel == "config.json" || rel == "manifest.json") continue;  // paths
    if (ReadFile(entry.path().string()) !=
        ReadFile((root / "jobs8" / rel).string())) {
      pass = false;
      mismatch = rel.string();
    }
  }
  Verdict(9, pass,
          pass ? "models and CSVs byte-identical at --jobs 1 and --jobs 8"
               : "first mismatching artifact: " + mismatch);
  CHECK(pass);
}
