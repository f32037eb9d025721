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

// Score-level fusion of two detectors: calibrate each component on ID
// validation data, normalize, aggregate and negate once. Also the
// feature-level fusion baselines and seed-ensemble summation.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodx/types.hpp"

namespace oodx {

enum class NormalizationMode { kStandardize, kMinMax, kNone };

std::string_view NormalizationModeName(NormalizationMode mode);
NormalizationMode ParseNormalizationMode(std::string_view name);

// Population statistics of a detector's positive distances on ID validation.
struct CalibrationStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::string detector;
  std::string split = "val";
  std::size_t n = 0;
  NormalizationMode mode = NormalizationMode::kStandardize;

  bool degenerate() const;

  nlohmann::json ToJson() const;
  static CalibrationStats FromJson(const nlohmann::json& j);
};

// Raised when the calibration values have zero spread. The stats are still
// usable: normalization then maps every value to 0.
class DegenerateCalibration : public Error {
 public:
  explicit DegenerateCalibration(CalibrationStats stats);
  const CalibrationStats& stats() const { return stats_; }

 private:
  CalibrationStats stats_;
};

CalibrationStats Calibrate(std::span<const double> raw_distances,
                           NormalizationMode mode = NormalizationMode::kStandardize);
// Uses scores.RawDistances() and records the detector tag.
CalibrationStats Calibrate(const ScoreVector& scores,
                           NormalizationMode mode = NormalizationMode::kStandardize);

struct NormalizedValue {
  double value;
  bool degenerate;
};

NormalizedValue Normalize(double raw_distance, const CalibrationStats& stats,
                          NormalizationMode mode);

struct Aggregator {
  enum class Kind { kMean, kMax, kWeighted };
  Kind kind = Kind::kMean;
  std::vector<double> weights;

  static Aggregator Mean() { return {}; }
  static Aggregator Max() { return {Kind::kMax, {}}; }
  // Throws kInvalidInput unless weights are non-negative and sum to 1.
  static Aggregator Weighted(std::vector<double> weights);
  // "mean", "max" or "weighted:w1,w2".
  static Aggregator Parse(std::string_view text);
  std::string ToString() const;

  double Apply(std::span<const double> values) const;
};

struct FusionOptions {
  Aggregator aggregator = Aggregator::Mean();
  NormalizationMode normalization = NormalizationMode::kStandardize;
};

// S(x) = -Agg(Norm(d_pre(x)), Norm(d_ft(x))). The returned vector is tagged
// "gnome" and stores the pre-negation aggregate in `distances`.
ScoreVector Gnome(const ScoreVector& pre, const ScoreVector& ft,
                  const CalibrationStats& stats_pre,
                  const CalibrationStats& stats_ft, FusionOptions options = {});

// General N-component form of the above.
ScoreVector FuseScores(std::span<const ScoreVector> components,
                       std::span<const CalibrationStats> stats,
                       FusionOptions options);

enum class FeatureFusionMode { kConcat, kAverage };

FeatureSet FeatureFuse(const FeatureSet& pre, const FeatureSet& ft,
                       FeatureFusionMode mode);

// Elementwise sum of aligned scores from the same detector family.
ScoreVector EnsembleSum(std::span<const ScoreVector> scores);

}  // namespace oodx
