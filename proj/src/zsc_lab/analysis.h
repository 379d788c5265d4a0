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
// Correlation between conditional policy similarity and cross-play scores:
// Pearson r, a seeded permutation test, and CSV/SVG scatter artifacts.

#ifndef ZSC_LAB_ANALYSIS_H_
#define ZSC_LAB_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "zsc_lab/crossplay.h"

namespace zsc_lab {

struct ScatterPoint {
  double x = 0.0;  // CPSTT in [0, 1]
  double y = 0.0;  // mean cross-play score
  std::string model_a;
  std::string model_b;
  std::string framework_a;
  std::string framework_b;
};

// One point per cell that carries CPSTT; x is the mean of the two
// directional estimates.
std::vector<ScatterPoint> ScatterFromCells(
    const std::vector<CrossPlayCell>& cells);

std::vector<ScatterPoint> ScatterFromCrossplayCsv(const std::string& content);

// Sample Pearson correlation, two-pass (means first, then centered moments)
// so the result is exactly permutation invariant. Throws NumericError on
// fewer than two points or zero variance in either coordinate.
double PearsonR(const std::vector<ScatterPoint>& points);

// Two-sided permutation test for r: p = (#{|r_perm| >= |r|} + 1) /
// (shuffles + 1) under seeded y-shuffles.
double PermutationPValue(const std::vector<ScatterPoint>& points,
                         int shuffles, uint64_t seed);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line of y on x. Throws NumericError when x is degenerate.
LinearFit FitLeastSquares(const std::vector<ScatterPoint>& points);

// Header cpstt,mean_score,model_a,model_b,framework_a,framework_b; rows
// sorted by (model_a, model_b); values at 6 significant digits.
std::string ScatterCsv(std::vector<ScatterPoint> points);

// Standalone deterministic SVG: labeled axes, one marker per point colored
// by framework pair, a least-squares fit line (suppressed for degenerate
// input) and an "r_p = ..." caption.
std::string ScatterSvg(const std::vector<ScatterPoint>& points, double r_p,
                       double max_score);

void WriteScatterCsv(const std::vector<ScatterPoint>& points,
                     const std::string& path);
void RenderScatterSvg(const std::vector<ScatterPoint>& points, double r_p,
                      double max_score, const std::string& path);

// Per-framework-pair correlation summary rows:
// framework_a,framework_b,n_points,mean_cpstt,mean_score,pearson_r
// plus a trailing "all,all,..." row. Pairs with degenerate variance report
// an empty pearson_r field rather than failing the whole summary.
std::string CorrelationSummaryCsv(const std::vector<ScatterPoint>& points);

}  // namespace zsc_lab

#endif  // ZSC_LAB_ANALYSIS_H_
