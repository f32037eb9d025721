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

#include "oodx/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace oodx {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kDegenerateCalibration: return "DegenerateCalibration";
    case ErrorKind::kAlignmentError: return "AlignmentError";
    case ErrorKind::kCorruptFile: return "CorruptFile";
    case ErrorKind::kUnsupportedKind: return "UnsupportedKind";
    case ErrorKind::kMalformedContainer: return "MalformedContainer";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kLastCls: return "last-cls";
    case FeatureKind::kLastAvg: return "last-avg";
    case FeatureKind::kFirstLastAvg: return "first-last-avg";
    case FeatureKind::kFinetunedCls: return "finetuned-cls";
    case FeatureKind::kOther: return "other";
  }
  return "other";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  for (auto k : {FeatureKind::kLastCls, FeatureKind::kLastAvg,
                 FeatureKind::kFirstLastAvg, FeatureKind::kFinetunedCls,
                 FeatureKind::kOther}) {
    if (FeatureKindName(k) == name) return k;
  }
  throw InvalidInput("unknown feature kind '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "test";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw InvalidInput("unknown split '" + std::string(name) + "'");
}

std::string_view CalibrationName(Calibration c) {
  switch (c) {
    case Calibration::kRaw: return "raw";
    case Calibration::kStandardize: return "standardize";
    case Calibration::kMinMax: return "minmax";
    case Calibration::kNone: return "none";
  }
  return "raw";
}

Calibration ParseCalibration(std::string_view name) {
  for (auto c : {Calibration::kRaw, Calibration::kStandardize,
                 Calibration::kMinMax, Calibration::kNone}) {
    if (CalibrationName(c) == name) return c;
  }
  throw InvalidInput("unknown calibration state '" + std::string(name) + "'");
}

namespace {

void CheckIds(const std::vector<std::string>& ids, std::size_t rows,
              std::string_view what) {
  if (ids.size() != rows) {
    throw InvalidInput(std::string(what) + ": " + std::to_string(ids.size()) +
                       " ids for " + std::to_string(rows) + " rows");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw InvalidInput(std::string(what) + ": duplicate id '" + id + "'");
    }
  }
}

}  // namespace

void FeatureSet::Validate() const {
  CheckIds(ids, features.rows(), "feature set");
  if (labels) {
    if (labels->size() != features.rows()) {
      throw InvalidInput("feature set: label count does not match rows");
    }
    for (int l : *labels) {
      if (l < 0) throw InvalidInput("feature set: negative label");
    }
  }
  if (!features.AllFinite()) throw InvalidInput("feature set: non-finite entry");
}

int FeatureSet::NumClasses() const {
  if (!labels || labels->empty()) return 0;
  int m = 0;
  for (int l : *labels) m = std::max(m, l);
  return m + 1;
}

void LogitSet::Validate() const {
  CheckIds(ids, logits.rows(), "logit set");
  if (logits.cols() < 2) throw InvalidInput("logit set: need at least 2 classes");
  if (!logits.AllFinite()) throw InvalidInput("logit set: non-finite entry");
}

void TokenLogProbSet::Validate() const {
  CheckIds(ids, logprobs.size(), "token log-prob set");
  for (std::size_t i = 0; i < logprobs.size(); ++i) {
    if (logprobs[i].empty()) {
      throw InvalidInput("token log-prob set: sample '" + ids[i] + "' has no tokens");
    }
    for (double lp : logprobs[i]) {
      if (!(lp <= 0.0) || std::isnan(lp)) {
        throw InvalidInput("token log-prob set: sample '" + ids[i] +
                           "' has a log-probability above 0 or NaN");
      }
    }
  }
}

void ScoreVector::Validate() const {
  CheckIds(ids, scores.size(), "score vector");
  if (distances && distances->size() != scores.size()) {
    throw InvalidInput("score vector: distance count does not match scores");
  }
}

std::vector<double> ScoreVector::RawDistances() const {
  if (distances) return *distances;
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = -scores[i];
  return out;
}

void RequireAligned(const std::vector<std::string>& a,
                    const std::vector<std::string>& b, std::string_view what) {
  if (a.size() != b.size()) {
    throw AlignmentError(std::string(what) + ": " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + " samples");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      throw AlignmentError(std::string(what) + ": id mismatch at row " +
                           std::to_string(i) + " ('" + a[i] + "' vs '" + b[i] +
                           "')");
    }
  }
}

std::vector<std::string> SequentialIds(std::size_t n, std::string_view prefix) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::string(prefix) + std::to_string(i));
  return ids;
}

}  // namespace oodx
