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

#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodx/types.hpp"

namespace oodx {

// Probability that a random ID sample scores above a random OOD sample, ties
// counted as one half. O(n log n) via mid-ranks.
double Auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

struct Far95Result {
  double far95;
  // The ceil(0.95 * N_id)-th largest ID score.
  double gamma;
  // Set when N_id < 20 and the 95% threshold is coarse.
  bool coarse;
};

// Fraction of OOD samples with score >= gamma, where gamma keeps at least 95%
// of ID samples at or above it.
Far95Result Far95(std::span<const double> id_scores,
                  std::span<const double> ood_scores);

enum class Decision { kId, kOod };

struct ThresholdDetector {
  double gamma = -std::numeric_limits<double>::infinity();
  std::string detector;

  Decision Decide(double score) const {
    return score >= gamma ? Decision::kId : Decision::kOod;
  }
};

struct EvalReport {
  double auroc = 0.0;
  double far95 = 0.0;
  double gamma_at_95tpr = 0.0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  std::string detector;
  std::string pair;
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
  // "pair detector AUROC FAR95" with both metrics as percentages.
  std::string TableRow() const;
};

EvalReport Evaluate(const ScoreVector& id_scores, const ScoreVector& ood_scores,
                    std::string pair = {});

}  // namespace oodx
