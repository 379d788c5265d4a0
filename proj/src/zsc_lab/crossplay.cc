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

#include "zsc_lab/crossplay.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "zsc_lab/errors.h"
#include "zsc_lab/policy.h"
#include "zsc_lab/rng.h"
#include "zsc_lab/util.h"

namespace zsc_lab {

ScoreStats MatchTotals::Stats() const {
  if (n_games < 1) throw ContractError("stats over zero games");
  ScoreStats stats;
  stats.n_games = n_games;
  const double n = static_cast<double>(n_games);
  stats.mean = static_cast<double>(score_sum) / n;
  if (n_games > 1) {
    const double ss = static_cast<double>(score_sqsum) -
                      n * stats.mean * stats.mean;
    const double variance = std::max(0.0, ss / (n - 1.0));
    stats.std_err = std::sqrt(variance / n);
  }
  return stats;
}

uint64_t PairSeed(uint64_t master_seed, const std::string& id_a,
                  const std::string& id_b) {
  // Symmetric in the ids so seat-balanced pairs share their deal schedule.
  const std::string lo = std::min(id_a, id_b);
  const std::string hi = std::max(id_a, id_b);
  const uint64_t h = Fnv1a64(lo + '\0' + hi);
  return DeriveSeed(master_seed, "pair", h);
}

MatchTotals PlayMatch(const ModelRecord& a, const ModelRecord& b,
                      int64_t n_games, uint64_t seed) {
  if (n_games < 2 || n_games % 2 != 0)
    throw ContractError("n_games must be even and >= 2");
  if (!a.game_config.SameRules(b.game_config))
    throw ConfigError("cross-play models have incompatible game rules");
  GreedyModelPolicy pa(a), pb(b);
  MatchTotals totals;
  for (int64_t g = 0; g < n_games / 2; ++g) {
    const uint64_t deal = DeriveSeed(seed, "match-deal", g);
    totals.Add(PlayEpisode(a.game_config, pa, pb, deal).score);
    totals.Add(PlayEpisode(a.game_config, pb, pa, deal).score);
  }
  return totals;
}

std::vector<CrossPlayCell> CrossPlayMatrix(const std::vector<PoolEntry>& pool,
                                           int64_t n_games,
                                           uint64_t master_seed,
                                           bool with_cpstt,
                                           int64_t cpstt_games, bool ordered,
                                           int jobs) {
  if (pool.size() < 2) throw ContractError("pool must hold >= 2 models");
  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(pool.size());
  if (ordered) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    // Canonical orientation by id, so the matrix is independent of the order
    // models were listed in.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (pool[i].id <= pool[j].id)
          pairs.emplace_back(i, j);
        else
          pairs.emplace_back(j, i);
      }
  }
  std::vector<CrossPlayCell> cells(pairs.size());
  ParallelFor(jobs, static_cast<int64_t>(pairs.size()), [&](int64_t k) {
    const auto [i, j] = pairs[k];
    const PoolEntry& a = pool[i];
    const PoolEntry& b = pool[j];
    CrossPlayCell cell;
    cell.id_a = a.id;
    cell.id_b = b.id;
    cell.framework_a = ToString(a.model->framework);
    cell.framework_b = ToString(b.model->framework);
    cell.seed_a = a.model->seed;
    cell.seed_b = b.model->seed;
    const uint64_t seed = PairSeed(master_seed, a.id, b.id);
    cell.totals = PlayMatch(*a.model, *b.model, n_games, seed);
    if (with_cpstt) {
      cell.cpstt_ab = EstimateCpstt(*a.model, *b.model, *a.model, cpstt_games,
                                    DeriveSeed(seed, "cpstt-ab", 0));
      cell.cpstt_ba = EstimateCpstt(*b.model, *a.model, *b.model, cpstt_games,
                                    DeriveSeed(seed, "cpstt-ba", 0));
    }
    cells[k] = std::move(cell);
  });
  std::sort(cells.begin(), cells.end(),
            [](const CrossPlayCell& x, const CrossPlayCell& y) {
              return std::tie(x.id_a, x.id_b) < std::tie(y.id_a, y.id_b);
            });
  return cells;
}

ScoreStats ZscAggregate(const std::vector<PoolEntry>& pool_m,
                        const std::vector<PoolEntry>& pool_mo,
                        int64_t n_games, uint64_t master_seed) {
  if (pool_m.empty() || pool_mo.empty())
    throw ConfigError("zsc_aggregate pools must be non-empty");
  const bool intra = [&] {
    if (pool_m.size() != pool_mo.size()) return false;
    for (size_t i = 0; i < pool_m.size(); ++i)
      if (pool_m[i].id != pool_mo[i].id) return false;
    return true;
  }();
  MatchTotals totals;
  if (intra) {
    // Self-pairs are self-play, not zero-shot coordination.
    for (size_t i = 0; i < pool_m.size(); ++i) {
      for (size_t j = i + 1; j < pool_m.size(); ++j) {
        totals.Merge(PlayMatch(*pool_m[i].model, *pool_m[j].model, n_games,
                               PairSeed(master_seed, pool_m[i].id,
                                        pool_m[j].id)));
      }
    }
  } else {
    for (const PoolEntry& a : pool_m) {
      for (const PoolEntry& b : pool_mo) {
        if (a.id == b.id) continue;
        totals.Merge(PlayMatch(*a.model, *b.model, n_games,
                               PairSeed(master_seed, a.id, b.id)));
      }
    }
  }
  if (totals.n_games == 0)
    throw ConfigError("zsc_aggregate has no qualifying pairs");
  return totals.Stats();
}

std::string CrossplayCsv(const std::vector<CrossPlayCell>& cells) {
  std::string out =
      "model_a,model_b,framework_a,framework_b,seed_a,seed_b,"
      "mean_score,std_err,n_games,cpstt_ab,cpstt_ba\n";
  for (const CrossPlayCell& cell : cells) {
    const ScoreStats stats = cell.totals.Stats();
    out += cell.id_a + ',' + cell.id_b + ',' + cell.framework_a + ',' +
           cell.framework_b + ',' + std::to_string(cell.seed_a) + ',' +
           std::to_string(cell.seed_b) + ',' + FormatSig6(stats.mean) + ',' +
           FormatSig6(stats.std_err) + ',' + std::to_string(stats.n_games) +
           ',';
    out += cell.cpstt_ab.has_value() ? FormatSig6(cell.cpstt_ab->value) : "";
    out += ',';
    out += cell.cpstt_ba.has_value() ? FormatSig6(cell.cpstt_ba->value) : "";
    out += '\n';
  }
  return out;
}

}  // namespace zsc_lab
