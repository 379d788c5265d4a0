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
// Cross-play evaluation: pair independently trained models, score the pairs
// with seat-balanced greedy matches, and aggregate intra-/inter-algorithm
// zero-shot coordination scores. All aggregation runs on exact integer score
// sums, so results are independent of computation order.

#ifndef ZSC_LAB_CROSSPLAY_H_
#define ZSC_LAB_CROSSPLAY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zsc_lab/qlearn.h"
#include "zsc_lab/similarity.h"

namespace zsc_lab {

struct ScoreStats {
  double mean = 0.0;
  double std_err = 0.0;  // sample stddev / sqrt(n_games)
  int64_t n_games = 0;
};

// Exact per-game score totals; ScoreStats are derived from these.
struct MatchTotals {
  int64_t score_sum = 0;
  int64_t score_sqsum = 0;
  int64_t n_games = 0;

  void Add(int score) {
    score_sum += score;
    score_sqsum += static_cast<int64_t>(score) * score;
    n_games += 1;
  }
  void Merge(const MatchTotals& other) {
    score_sum += other.score_sum;
    score_sqsum += other.score_sqsum;
    n_games += other.n_games;
  }
  ScoreStats Stats() const;
};

// A model plus the identity the matrix reports it under.
struct PoolEntry {
  std::string id;
  const ModelRecord* model = nullptr;
};

struct CrossPlayCell {
  std::string id_a;
  std::string id_b;
  std::string framework_a;
  std::string framework_b;
  uint64_t seed_a = 0;
  uint64_t seed_b = 0;
  MatchTotals totals;
  std::optional<SimilarityEstimate> cpstt_ab;  // S_{pi_a}(pi_b, pi_a)
  std::optional<SimilarityEstimate> cpstt_ba;
};

// Per-pair seed derived from the master seed and both ids, so adding models
// to a pool never reshuffles existing cells.
uint64_t PairSeed(uint64_t master_seed, const std::string& id_a,
                  const std::string& id_b);

// Seat-balanced greedy match: n_games/2 deals with a on seat 0 and the same
// deals with seats swapped. n_games must be even and >= 2.
MatchTotals PlayMatch(const ModelRecord& a, const ModelRecord& b,
                      int64_t n_games, uint64_t seed);

// One cell per unordered pair (i < j) by default; `ordered` emits every
// ordered pair including self-pairs. Cells are computed independently from
// (pair ids, master seed) and sorted by (id_a, id_b) on return.
std::vector<CrossPlayCell> CrossPlayMatrix(const std::vector<PoolEntry>& pool,
                                           int64_t n_games,
                                           uint64_t master_seed,
                                           bool with_cpstt,
                                           int64_t cpstt_games, bool ordered,
                                           int jobs);

// Z(M): mean per-game score over all qualifying pairs. Intra-algorithm mode
// is pool_mo == pool_m with self-pairs excluded (pass the same pool twice);
// inter mode pairs every model of pool_m with every model of pool_mo.
ScoreStats ZscAggregate(const std::vector<PoolEntry>& pool_m,
                        const std::vector<PoolEntry>& pool_mo,
                        int64_t n_games, uint64_t master_seed);

// CSV with header model_a,model_b,framework_a,framework_b,seed_a,seed_b,
// mean_score,std_err,n_games,cpstt_ab,cpstt_ba. Returns the file content.
std::string CrossplayCsv(const std::vector<CrossPlayCell>& cells);

}  // namespace zsc_lab

#endif  // ZSC_LAB_CROSSPLAY_H_
