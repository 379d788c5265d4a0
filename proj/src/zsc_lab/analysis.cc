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

#include "zsc_lab/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "zsc_lab/errors.h"
#include "zsc_lab/rng.h"
#include "zsc_lab/util.h"

namespace zsc_lab {

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double PearsonFromXy(const std::vector<double>& xs_in,
                     const std::vector<double>& ys_in) {
  const size_t n = xs_in.size();
  if (n < 2) throw NumericError("pearson_r needs at least two points");
  // Accumulate in a canonical order so the result is exactly permutation
  // invariant despite floating-point non-associativity.
  std::vector<std::pair<double, double>> pts(n);
  for (size_t i = 0; i < n; ++i) pts[i] = {xs_in[i], ys_in[i]};
  std::sort(pts.begin(), pts.end());
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = pts[i].first;
    ys[i] = pts[i].second;
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw NumericError("pearson_r on zero-variance input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

std::vector<ScatterPoint> ScatterFromCells(
    const std::vector<CrossPlayCell>& cells) {
  std::vector<ScatterPoint> points;
  for (const CrossPlayCell& cell : cells) {
    if (!cell.cpstt_ab.has_value() || !cell.cpstt_ba.has_value()) continue;
    ScatterPoint p;
    p.x = 0.5 * (cell.cpstt_ab->value + cell.cpstt_ba->value);
    p.y = cell.totals.Stats().mean;
    p.model_a = cell.id_a;
    p.model_b = cell.id_b;
    p.framework_a = cell.framework_a;
    p.framework_b = cell.framework_b;
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<ScatterPoint> ScatterFromCrossplayCsv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty cross-play matrix file");
  std::vector<ScatterPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 11) throw ConfigError("malformed cross-play row: " + line);
    if (f[9].empty() || f[10].empty()) continue;  // no CPSTT recorded
    ScatterPoint p;
    p.model_a = f[0];
    p.model_b = f[1];
    p.framework_a = f[2];
    p.framework_b = f[3];
    p.y = std::stod(f[6]);
    p.x = 0.5 * (std::stod(f[9]) + std::stod(f[10]));
    points.push_back(std::move(p));
  }
  return points;
}

double PearsonR(const std::vector<ScatterPoint>& points) {
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const ScatterPoint& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw NumericError("non-finite scatter point");
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  return PearsonFromXy(xs, ys);
}

double PermutationPValue(const std::vector<ScatterPoint>& points,
                         int shuffles, uint64_t seed) {
  if (shuffles < 1) throw ContractError("shuffles must be >= 1");
  const double observed = std::abs(PearsonR(points));
  std::vector<double> xs, ys;
  for (const ScatterPoint& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  Rng rng(DeriveSeed(seed, "permutation-test", 0));
  int hits = 0;
  for (int s = 0; s < shuffles; ++s) {
    for (int i = static_cast<int>(ys.size()) - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.NextBounded(i + 1));
      std::swap(ys[i], ys[j]);
    }
    try {
      if (std::abs(PearsonFromXy(xs, ys)) >= observed) ++hits;
    } catch (const NumericError&) {
      // A degenerate shuffle cannot exceed the observed correlation.
    }
  }
  return static_cast<double>(hits + 1) / static_cast<double>(shuffles + 1);
}

LinearFit FitLeastSquares(const std::vector<ScatterPoint>& points) {
  const size_t n = points.size();
  if (n < 2) throw NumericError("least-squares fit needs two points");
  double mean_x = 0.0, mean_y = 0.0;
  for (const ScatterPoint& p : points) {
    mean_x += p.x;
    mean_y += p.y;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const ScatterPoint& p : points) {
    sxx += (p.x - mean_x) * (p.x - mean_x);
    sxy += (p.x - mean_x) * (p.y - mean_y);
  }
  if (sxx == 0.0) throw NumericError("least-squares fit on constant x");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

std::string ScatterCsv(std::vector<ScatterPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) {
              return std::tie(a.model_a, a.model_b) <
                     std::tie(b.model_a, b.model_b);
            });
  std::string out =
      "cpstt,mean_score,model_a,model_b,framework_a,framework_b\n";
  for (const ScatterPoint& p : points) {
    out += FormatSig6(p.x) + ',' + FormatSig6(p.y) + ',' + p.model_a + ',' +
           p.model_b + ',' + p.framework_a + ',' + p.framework_b + '\n';
  }
  return out;
}

std::string ScatterSvg(const std::vector<ScatterPoint>& points, double r_p,
                       double max_score) {
  if (points.empty()) throw ContractError("scatter plot needs >= 1 point");
  const int width = 640, height = 480;
  const int left = 70, right = 20, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double y_max = max_score > 0 ? max_score : 1.0;
  auto px = [&](double x) { return left + x * plot_w; };
  auto py = [&](double y) { return top + (1.0 - y / y_max) * plot_h; };

  // Stable palette: framework pairs in sorted order.
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::map<std::string, std::string> color_of;
  for (const ScatterPoint& p : points) {
    const std::string pair_key = p.framework_a <= p.framework_b
                                     ? p.framework_a + "/" + p.framework_b
                                     : p.framework_b + "/" + p.framework_a;
    color_of.emplace(pair_key, "");
  }
  size_t color_index = 0;
  for (auto& [pair_key, color] : color_of) {
    color = kColors[color_index % (sizeof(kColors) / sizeof(kColors[0]))];
    ++color_index;
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes.
  svg += "<line x1=\"" + FormatSig6(px(0)) + "\" y1=\"" + FormatSig6(py(0)) +
         "\" x2=\"" + FormatSig6(px(1)) + "\" y2=\"" + FormatSig6(py(0)) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + FormatSig6(px(0)) + "\" y1=\"" + FormatSig6(py(0)) +
         "\" x2=\"" + FormatSig6(px(0)) + "\" y2=\"" +
         FormatSig6(py(y_max)) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double x = t / 5.0;
    svg += "<line x1=\"" + FormatSig6(px(x)) + "\" y1=\"" +
           FormatSig6(py(0)) + "\" x2=\"" + FormatSig6(px(x)) + "\" y2=\"" +
           FormatSig6(py(0) + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + FormatSig6(px(x)) + "\" y=\"" +
           FormatSig6(py(0) + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + FormatSig6(x) +
           "</text>\n";
    const double y = y_max * t / 5.0;
    svg += "<line x1=\"" + FormatSig6(px(0) - 5) + "\" y1=\"" +
           FormatSig6(py(y)) + "\" x2=\"" + FormatSig6(px(0)) + "\" y2=\"" +
           FormatSig6(py(y)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + FormatSig6(px(0) - 10) + "\" y=\"" +
           FormatSig6(py(y) + 4) + "\" font-size=\"12\" text-anchor=\"end\">" +
           FormatSig6(y) + "</text>\n";
  }
  svg += "<text x=\"" + FormatSig6(left + plot_w / 2) + "\" y=\"" +
         std::to_string(height - 15) +
         "\" font-size=\"14\" text-anchor=\"middle\">CPSTT</text>\n";
  svg += "<text x=\"18\" y=\"" + FormatSig6(top + plot_h / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "18 " +
         FormatSig6(top + plot_h / 2) + ")\">cross-play score</text>\n";
  // Fit line, suppressed when x has no spread.
  if (points.size() >= 2) {
    try {
      const LinearFit fit = FitLeastSquares(points);
      const double y0 = fit.intercept;
      const double y1 = fit.slope + fit.intercept;
      svg += "<line x1=\"" + FormatSig6(px(0)) + "\" y1=\"" +
             FormatSig6(py(y0)) + "\" x2=\"" + FormatSig6(px(1)) +
             "\" y2=\"" + FormatSig6(py(y1)) +
             "\" stroke=\"#444444\" stroke-dasharray=\"5,4\"/>\n";
    } catch (const NumericError&) {
    }
  }
  for (const ScatterPoint& p : points) {
    const std::string pair_key = p.framework_a <= p.framework_b
                                     ? p.framework_a + "/" + p.framework_b
                                     : p.framework_b + "/" + p.framework_a;
    svg += "<circle cx=\"" + FormatSig6(px(p.x)) + "\" cy=\"" +
           FormatSig6(py(p.y)) + "\" r=\"4\" fill=\"" + color_of[pair_key] +
           "\" fill-opacity=\"0.8\"/>\n";
  }
  svg += "<text x=\"" + FormatSig6(left + 10) + "\" y=\"" +
         std::to_string(top - 10) + "\" font-size=\"14\">r_p = " +
         FormatFixed3(r_p) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

void WriteScatterCsv(const std::vector<ScatterPoint>& points,
                     const std::string& path) {
  AtomicWriteFile(path, ScatterCsv(points));
}

void RenderScatterSvg(const std::vector<ScatterPoint>& points, double r_p,
                      double max_score, const std::string& path) {
  AtomicWriteFile(path, ScatterSvg(points, r_p, max_score));
}

std::string CorrelationSummaryCsv(const std::vector<ScatterPoint>& points) {
  std::map<std::pair<std::string, std::string>, std::vector<ScatterPoint>>
      groups;
  for (const ScatterPoint& p : points) {
    auto pair_key = p.framework_a <= p.framework_b
                        ? std::make_pair(p.framework_a, p.framework_b)
                        : std::make_pair(p.framework_b, p.framework_a);
    groups[pair_key].push_back(p);
  }
  std::string out =
      "framework_a,framework_b,n_points,mean_cpstt,mean_score,pearson_r\n";
  auto emit = [&out](const std::string& fa, const std::string& fb,
                     const std::vector<ScatterPoint>& group) {
    double mean_x = 0.0, mean_y = 0.0;
    for (const ScatterPoint& p : group) {
      mean_x += p.x;
      mean_y += p.y;
    }
    mean_x /= static_cast<double>(group.size());
    mean_y /= static_cast<double>(group.size());
    std::string r_field;
    try {
      r_field = FormatSig6(PearsonR(group));
    } catch (const NumericError&) {
      r_field = "";
    }
    out += fa + ',' + fb + ',' + std::to_string(group.size()) + ',' +
           FormatSig6(mean_x) + ',' + FormatSig6(mean_y) + ',' + r_field +
           '\n';
  };
  for (const auto& [pair_key, group] : groups)
    emit(pair_key.first, pair_key.second, group);
  if (!points.empty()) emit("all", "all", points);
  return out;
}

}  // namespace zsc_lab
