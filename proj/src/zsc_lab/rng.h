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

#ifndef ZSC_LAB_RNG_H_
#define ZSC_LAB_RNG_H_

#include <cstdint>
#include <string_view>

namespace zsc_lab {

// Self-contained xoshiro256** generator. Results are identical on every
// platform, unlike the distributions in <random>, which is what makes the
// byte-identical reproducibility contracts of this project testable.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t NextUint64();

  // Uniform integer in [0, bound), bound >= 1. Rejection sampling, unbiased.
  uint64_t NextBounded(uint64_t bound);

  // Uniform double in [0, 1) with 53 bits of precision.
  double NextDouble();

  // True with probability p. Always consumes exactly one draw.
  bool NextBernoulli(double p);

 private:
  uint64_t state_[4];
};

// Deterministically derives an independent stream seed from a master seed, a
// purpose tag and an index. Distinct (tag, index) pairs give statistically
// independent streams, so adding parallelism never reorders draws.
uint64_t DeriveSeed(uint64_t master_seed, std::string_view tag, uint64_t index);

// FNV-1a over an arbitrary byte string, used for stable content hashes.
uint64_t Fnv1a64(std::string_view bytes);

}  // namespace zsc_lab

#endif  // ZSC_LAB_RNG_H_
