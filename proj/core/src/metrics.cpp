/*
 * Copyright 2026 The oodx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace oodx {

namespace {

void CheckScores(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    throw InvalidInput("evaluation needs at least one ID and one OOD score");
  }
  auto is_nan = [](double v) { return std::isnan(v); };
  if (std::any_of(id_scores.begin(), id_scores.end(), is_nan) ||
      std::any_of(ood_scores.begin(), ood_scores.end(), is_nan)) {
    throw InvalidInput("evaluation scores contain NaN");
  }
}

}  // namespace

double Auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  CheckScores(id_scores, ood_scores);
  const std::size_t n_id = id_scores.size();
  const std::size_t n = n_id + ood_scores.size();

  struct Entry {
    double score;
    bool is_id;
  };
  std::vector<Entry> all;
  all.reserve(n);
  for (double s : id_scores) all.push_back({s, true});
  for (double s : ood_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Sum of ID mid-ranks (1-based). Ranks are half-integers, so the sum is
  // exact in double for any realistic n.
  double id_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t ids_in_group = 0;
    while (j < n && all[j].score == all[i].score) {
      ids_in_group += all[j].is_id ? 1 : 0;
      ++j;
    }
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    id_rank_sum += mid_rank * static_cast<double>(ids_in_group);
    i = j;
  }
  const double u = id_rank_sum - static_cast<double>(n_id) *
                                     static_cast<double>(n_id + 1) / 2.0;
  return u / (static_cast<double>(n_id) * static_cast<double>(ood_scores.size()));
}

Far95Result Far95(std::span<const double> id_scores,
                  std::span<const double> ood_scores) {
  CheckScores(id_scores, ood_scores);
  std::vector<double> sorted(id_scores.begin(), id_scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t n_id = sorted.size();
  // ceil(0.95 * n_id) in integer arithmetic.
  const std::size_t needed = (95 * n_id + 99) / 100;
  const double gamma = sorted[needed - 1];
  const auto accepted = std::count_if(ood_scores.begin(), ood_scores.end(),
                                      [gamma](double s) { return s >= gamma; });
  return {static_cast<double>(accepted) / static_cast<double>(ood_scores.size()),
          gamma, n_id < 20};
}

nlohmann::json EvalReport::ToJson() const {
  return {{"pair", pair},         {"detector", detector},
          {"auroc", auroc},       {"far95", far95},
          {"gamma_at_95tpr", gamma_at_95tpr},
          {"n_id", n_id},         {"n_ood", n_ood},
          {"warnings", warnings}};
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  r.pair = j.value("pair", std::string());
  r.detector = j.value("detector", std::string());
  r.auroc = j.at("auroc").get<double>();
  r.far95 = j.at("far95").get<double>();
  r.gamma_at_95tpr = j.at("gamma_at_95tpr").get<double>();
  r.n_id = j.at("n_id").get<std::size_t>();
  r.n_ood = j.at("n_ood").get<std::size_t>();
  r.warnings = j.value("warnings", std::vector<std::string>());
  return r;
}

std::string EvalReport::TableRow() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f %.2f", auroc * 100.0, far95 * 100.0);
  return (pair.empty() ? std::string("-") : pair) + " " +
         (detector.empty() ? std::string("-") : detector) + " " + buf;
}

EvalReport Evaluate(const ScoreVector& id_scores, const ScoreVector& ood_scores,
                    std::string pair) {
  EvalReport r;
  r.pair = std::move(pair);
  r.detector = id_scores.detector;
  r.n_id = id_scores.size();
  r.n_ood = ood_scores.size();
  if (id_scores.detector != ood_scores.detector) {
    r.warnings.push_back("ID and OOD scores come from different detectors ('" +
                         id_scores.detector + "' vs '" + ood_scores.detector + "')");
  }
  r.auroc = Auroc(id_scores.scores, ood_scores.scores);
  const auto far = Far95(id_scores.scores, ood_scores.scores);
  r.far95 = far.far95;
  r.gamma_at_95tpr = far.gamma;
  if (far.coarse) {
    r.warnings.push_back("fewer than 20 ID samples; the 95% TPR threshold is coarse");
  }
  return r;
}

}  // namespace oodx
