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

// In-memory data sets exchanged between the detectors, the fusion layer and
// the evaluation harness.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodx/linalg.hpp"

namespace oodx {

// Pooling recipe that produced a sentence vector.
enum class FeatureKind { kLastCls, kLastAvg, kFirstLastAvg, kFinetunedCls, kOther };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

// N x d feature vectors with per-row ids and optional class labels.
struct FeatureSet {
  Matrix features;
  std::vector<std::string> ids;
  std::optional<std::vector<int>> labels;
  FeatureKind feature_kind = FeatureKind::kOther;
  std::string model_name;
  Split split = Split::kTrain;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }

  // Checks ids (count, uniqueness), labels (count, non-negative) and
  // finiteness. Throws kInvalidInput.
  void Validate() const;
  // Number of classes implied by labels (max + 1), 0 without labels.
  int NumClasses() const;
};

// N x C classifier logits.
struct LogitSet {
  Matrix logits;
  std::vector<std::string> ids;
  std::string model_name;
  Split split = Split::kTest;

  std::size_t size() const { return logits.rows(); }
  std::size_t num_classes() const { return logits.cols(); }
  void Validate() const;
};

// Ragged per-sample natural-log token probabilities.
struct TokenLogProbSet {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> logprobs;

  std::size_t size() const { return ids.size(); }
  void Validate() const;
};

// How the values in a ScoreVector relate to the raw detector statistic.
enum class Calibration { kRaw, kStandardize, kMinMax, kNone };

std::string_view CalibrationName(Calibration c);
Calibration ParseCalibration(std::string_view name);

// Per-sample confidence scores S(x); higher means more in-distribution.
//
// Distance-style detectors (md, knn, lof, fused scores) also carry the
// positive statistic the score was negated from, so that calibration never
// has to undo a sign.
struct ScoreVector {
  std::string detector;
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::optional<std::vector<double>> distances;
  Calibration calibration = Calibration::kRaw;
  // Component detector tags for fused scores.
  std::vector<std::string> components;
  std::string aggregator;
  // Rows whose computation hit a numeric guard (e.g. energy exp clamp).
  std::vector<std::size_t> flagged_rows;

  std::size_t size() const { return scores.size(); }
  void Validate() const;

  // The positive statistic for calibration: `distances` if present,
  // otherwise -scores.
  std::vector<double> RawDistances() const;
};

// Throws kAlignmentError unless both id lists are identical and in order.
void RequireAligned(const std::vector<std::string>& a,
                    const std::vector<std::string>& b, std::string_view what);

// "0", "1", ... for generated or anonymous rows.
std::vector<std::string> SequentialIds(std::size_t n, std::string_view prefix = {});

}  // namespace oodx
