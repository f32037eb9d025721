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

#include "oodx/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace oodx {

std::string_view NormalizationModeName(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::kStandardize: return "standardize";
    case NormalizationMode::kMinMax: return "minmax";
    case NormalizationMode::kNone: return "none";
  }
  return "none";
}

NormalizationMode ParseNormalizationMode(std::string_view name) {
  if (name == "standardize") return NormalizationMode::kStandardize;
  if (name == "minmax") return NormalizationMode::kMinMax;
  if (name == "none") return NormalizationMode::kNone;
  throw InvalidInput("unknown normalization mode '" + std::string(name) + "'");
}

bool CalibrationStats::degenerate() const { return !(std > 0.0) || !(max > min); }

nlohmann::json CalibrationStats::ToJson() const {
  return {{"mean", mean},     {"std", std},     {"min", min},
          {"max", max},       {"detector", detector},
          {"split", split},   {"n", n},         {"mode", NormalizationModeName(mode)}};
}

CalibrationStats CalibrationStats::FromJson(const nlohmann::json& j) {
  try {
    CalibrationStats s;
    s.mean = j.at("mean").get<double>();
    s.std = j.at("std").get<double>();
    s.min = j.value("min", s.mean);
    s.max = j.value("max", s.mean);
    s.detector = j.value("detector", std::string());
    s.split = j.value("split", std::string("val"));
    s.n = j.at("n").get<std::size_t>();
    s.mode = ParseNormalizationMode(j.value("mode", std::string("standardize")));
    if (s.std < 0.0) throw InvalidInput("calibration std must be non-negative");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed calibration stats: ") + e.what());
  }
}

DegenerateCalibration::DegenerateCalibration(CalibrationStats stats)
    : Error(ErrorKind::kDegenerateCalibration,
            "calibration values have zero spread (all equal to " +
                std::to_string(stats.mean) + "); normalized values will be 0"),
      stats_(std::move(stats)) {}

CalibrationStats Calibrate(std::span<const double> raw, NormalizationMode mode) {
  if (raw.size() < 2) {
    throw InvalidInput("calibration needs at least 2 samples, got " +
                       std::to_string(raw.size()));
  }
  CalibrationStats s;
  s.n = raw.size();
  s.mode = mode;
  const double n = static_cast<double>(raw.size());
  s.mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : raw) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  s.min = *lo;
  s.max = *hi;
  if (s.degenerate()) throw DegenerateCalibration(s);
  return s;
}

CalibrationStats Calibrate(const ScoreVector& scores, NormalizationMode mode) {
  const auto raw = scores.RawDistances();
  try {
    CalibrationStats s = Calibrate(raw, mode);
    s.detector = scores.detector;
    return s;
  } catch (const DegenerateCalibration& e) {
    CalibrationStats s = e.stats();
    s.detector = scores.detector;
    throw DegenerateCalibration(s);
  }
}

NormalizedValue Normalize(double v, const CalibrationStats& stats,
                          NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::kStandardize:
      if (!(stats.std > 0.0)) return {0.0, true};
      return {(v - stats.mean) / stats.std, false};
    case NormalizationMode::kMinMax:
      if (!(stats.max > stats.min)) return {0.0, true};
      return {(v - stats.min) / (stats.max - stats.min), false};
    case NormalizationMode::kNone:
      return {v, false};
  }
  return {v, false};
}

Aggregator Aggregator::Weighted(std::vector<double> weights) {
  if (weights.empty()) throw InvalidInput("weighted aggregation needs weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("aggregation weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInput("aggregation weights must sum to 1");
  }
  return {Kind::kWeighted, std::move(weights)};
}

Aggregator Aggregator::Parse(std::string_view text) {
  if (text == "mean") return Mean();
  if (text == "max") return Max();
  constexpr std::string_view kPrefix = "weighted:";
  if (text.substr(0, kPrefix.size()) == kPrefix) {
    std::vector<double> weights;
    std::stringstream ss{std::string(text.substr(kPrefix.size()))};
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        weights.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidInput("bad aggregation weight '" + item + "'");
      }
    }
    return Weighted(std::move(weights));
  }
  throw InvalidInput("unknown aggregator '" + std::string(text) +
                     "' (expected mean, max or weighted:w1,w2)");
}

std::string Aggregator::ToString() const {
  switch (kind) {
    case Kind::kMean: return "mean";
    case Kind::kMax: return "max";
    case Kind::kWeighted: {
      std::ostringstream out;
      out.precision(17);
      out << "weighted:";
      for (std::size_t i = 0; i < weights.size(); ++i) {
        out << (i ? "," : "") << weights[i];
      }
      return out.str();
    }
  }
  return "mean";
}

double Aggregator::Apply(std::span<const double> values) const {
  switch (kind) {
    case Kind::kMean: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case Kind::kMax:
      return *std::max_element(values.begin(), values.end());
    case Kind::kWeighted: {
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
      return s;
    }
  }
  return 0.0;
}

ScoreVector FuseScores(std::span<const ScoreVector> components,
                       std::span<const CalibrationStats> stats,
                       FusionOptions options) {
  if (components.size() < 2) {
    throw InvalidInput("score fusion needs at least 2 components");
  }
  if (stats.size() != components.size()) {
    throw InvalidInput("one set of calibration stats is required per component");
  }
  if (options.aggregator.kind == Aggregator::Kind::kWeighted &&
      options.aggregator.weights.size() != components.size()) {
    throw InvalidInput("weighted aggregation needs one weight per component");
  }
  for (std::size_t c = 1; c < components.size(); ++c) {
    RequireAligned(components[0].ids, components[c].ids, "score fusion");
  }

  std::vector<std::vector<double>> raw;
  raw.reserve(components.size());
  for (const auto& comp : components) raw.push_back(comp.RawDistances());

  const std::size_t n = components[0].size();
  ScoreVector out;
  out.detector = "gnome";
  out.ids = components[0].ids;
  out.scores.resize(n);
  out.distances.emplace(n);
  out.aggregator = options.aggregator.ToString();
  switch (options.normalization) {
    case NormalizationMode::kStandardize: out.calibration = Calibration::kStandardize; break;
    case NormalizationMode::kMinMax: out.calibration = Calibration::kMinMax; break;
    case NormalizationMode::kNone: out.calibration = Calibration::kNone; break;
  }
  for (const auto& comp : components) out.components.push_back(comp.detector);

  std::vector<double> normalized(components.size());
  for (std::size_t i = 0; i < n; ++i) {
    bool flagged = false;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto nv = Normalize(raw[c][i], stats[c], options.normalization);
      normalized[c] = nv.value;
      flagged |= nv.degenerate;
    }
    const double agg = options.aggregator.Apply(normalized);
    (*out.distances)[i] = agg;
    out.scores[i] = -agg;
    if (flagged) out.flagged_rows.push_back(i);
  }
  return out;
}

ScoreVector Gnome(const ScoreVector& pre, const ScoreVector& ft,
                  const CalibrationStats& stats_pre,
                  const CalibrationStats& stats_ft, FusionOptions options) {
  const ScoreVector components[] = {pre, ft};
  const CalibrationStats stats[] = {stats_pre, stats_ft};
  return FuseScores(components, stats, options);
}

FeatureSet FeatureFuse(const FeatureSet& pre, const FeatureSet& ft,
                       FeatureFusionMode mode) {
  RequireAligned(pre.ids, ft.ids, "feature fusion");
  if (pre.labels && ft.labels && *pre.labels != *ft.labels) {
    throw AlignmentError("feature fusion: the two sets disagree on labels");
  }
  const std::size_t n = pre.size();
  FeatureSet out;
  out.ids = pre.ids;
  out.labels = pre.labels ? pre.labels : ft.labels;
  out.split = pre.split;
  out.feature_kind = FeatureKind::kOther;
  out.model_name = pre.model_name + "+" + ft.model_name;

  if (mode == FeatureFusionMode::kConcat) {
    const std::size_t d = pre.dim() + ft.dim();
    out.features = Matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      auto dst = out.features.row(r);
      const auto a = pre.features.row(r);
      const auto b = ft.features.row(r);
      std::copy(a.begin(), a.end(), dst.begin());
      std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
    }
  } else {
    if (pre.dim() != ft.dim()) {
      throw DimensionMismatch("feature averaging requires equal dimensions (" +
                              std::to_string(pre.dim()) + " vs " +
                              std::to_string(ft.dim()) + ")");
    }
    out.features = Matrix(n, pre.dim());
    for (std::size_t r = 0; r < n; ++r) {
      auto dst = out.features.row(r);
      const auto a = pre.features.row(r);
      const auto b = ft.features.row(r);
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<float>(
            (static_cast<double>(a[i]) + static_cast<double>(b[i])) / 2.0);
      }
    }
  }
  return out;
}

ScoreVector EnsembleSum(std::span<const ScoreVector> scores) {
  if (scores.size() < 2) {
    throw InvalidInput("ensemble summation needs at least 2 score vectors");
  }
  bool all_distances = true;
  for (const auto& s : scores) {
    if (s.detector != scores[0].detector) {
      throw InvalidInput("ensemble summation mixes detectors '" + scores[0].detector +
                         "' and '" + s.detector + "'");
    }
    RequireAligned(scores[0].ids, s.ids, "ensemble summation");
    all_distances &= s.distances.has_value();
  }
  ScoreVector out;
  out.detector = scores[0].detector;
  out.ids = scores[0].ids;
  out.calibration = scores[0].calibration;
  out.scores.assign(scores[0].size(), 0.0);
  if (all_distances) out.distances.emplace(scores[0].size(), 0.0);
  for (const auto& s : scores) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.scores[i] += s.scores[i];
      if (all_distances) (*out.distances)[i] += (*s.distances)[i];
    }
  }
  return out;
}

}  // namespace oodx
