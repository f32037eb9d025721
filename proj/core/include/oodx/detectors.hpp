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

// Scoring functions other than the Mahalanobis detector. Every score follows
// the same convention: higher means more in-distribution.

#pragma once

#include <span>

#include "oodx/linalg.hpp"
#include "oodx/types.hpp"

namespace oodx {

inline constexpr double kDefaultTemperature = 1000.0;
inline constexpr int kDefaultKnnK = 10;
inline constexpr int kDefaultLofK = 20;
// exp() arguments above this are clamped in the energy score.
inline constexpr double kEnergyExpClamp = 700.0;
inline constexpr double kLofZeroDistanceEpsilon = 1e-12;

// --- Logit-based confidence -------------------------------------------------

// max_i softmax(logits / temperature)_i for one row.
double MaxSoftmax(std::span<const float> logits, double temperature = 1.0);
// KL(softmax(logits) || uniform), with 0 ln 0 = 0.
double KlToUniform(std::span<const float> logits);
// -log(sum_i exp(f_i)), computed stably.
double NegLogSumExp(std::span<const float> logits);

ScoreVector Msp(const LogitSet& logits);
// Throws kInvalidInput for temperature <= 0.
ScoreVector ScaledMsp(const LogitSet& logits, double temperature = kDefaultTemperature);

struct EnergyOptions {
  // false: S = -sum_i exp(f_i); true: S = -logsumexp(f). Rank-equivalent.
  bool logsumexp = false;
};
// Rows that hit the exp clamp are listed in ScoreVector::flagged_rows.
ScoreVector Energy(const LogitSet& logits, EnergyOptions options = {});
ScoreVector D2u(const LogitSet& logits);

// S = exp(mean token log-prob) = 1 / perplexity.
ScoreVector PplScore(const TokenLogProbSet& logprobs);

// --- K nearest neighbours ---------------------------------------------------

struct Neighbor {
  double distance;
  std::size_t index;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exhaustive-scan index over L2-normalized training rows. Scores are
// S = -(mean Euclidean distance to the k nearest rows) in normalized space.
class KnnIndex {
 public:
  static KnnIndex Fit(const FeatureSet& train, int k = kDefaultKnnK);
  // Rows are used as given; they must already be normalized.
  static KnnIndex FromNormalized(Matrix normalized_rows, int k);

  int k() const { return k_; }
  std::size_t size() const { return rows_.rows(); }
  std::size_t dim() const { return rows_.cols(); }
  const Matrix& rows() const { return rows_; }
  const std::vector<std::size_t>& zero_rows() const { return zero_rows_; }

  // The k nearest training rows to an already-normalized query, ordered by
  // (distance, index).
  std::vector<Neighbor> Search(std::span<const float> normalized_query) const;
  double Score(std::span<const float> query) const;
  ScoreVector ScoreBatch(const FeatureSet& queries, int threads = 1) const;

 private:
  KnnIndex(Matrix rows, int k, std::vector<std::size_t> zero_rows)
      : rows_(std::move(rows)), k_(k), zero_rows_(std::move(zero_rows)) {}

  Matrix rows_;
  int k_;
  std::vector<std::size_t> zero_rows_;
};

// Euclidean distance accumulated in double.
double EuclideanDistance(std::span<const float> a, std::span<const float> b);

// --- Local outlier factor ---------------------------------------------------

struct LofOptions {
  int k = kDefaultLofK;
  // L2-normalize training rows and queries before the neighbour search.
  bool normalize = false;
  // Workers for the training-set neighbour pass.
  int threads = 1;
};

// Local outlier factor (k-distance, reachability distance, local
// reachability density) over a fixed training set. Neighbourhoods contain
// exactly k points, ties broken by lower training index; a training point is
// never its own neighbour. Scores are S = -LOF.
class LofModel {
 public:
  static LofModel Fit(const FeatureSet& train, LofOptions options = {});
  static LofModel FromParts(Matrix train, int k, bool normalize,
                            std::vector<double> k_distances,
                            std::vector<double> lrd);

  int k() const { return k_; }
  bool normalize() const { return normalize_; }
  std::size_t size() const { return train_.rows(); }
  std::size_t dim() const { return train_.cols(); }
  const Matrix& train() const { return train_; }
  const std::vector<double>& k_distances() const { return k_distances_; }
  const std::vector<double>& lrd() const { return lrd_; }

  double Lof(std::span<const float> query) const;
  double Score(std::span<const float> query) const { return -Lof(query); }
  ScoreVector ScoreBatch(const FeatureSet& queries, int threads = 1) const;
  // LOF of each training point with respect to the rest of the set.
  std::vector<double> TrainingLof() const;

 private:
  LofModel(Matrix train, int k, bool normalize, std::vector<double> kdist,
           std::vector<double> lrd);

  std::vector<Neighbor> Neighbors(std::span<const float> q,
                                  std::ptrdiff_t exclude) const;
  double LrdOf(std::span<const Neighbor> neighbors) const;

  Matrix train_;
  int k_;
  bool normalize_;
  std::vector<double> k_distances_;
  std::vector<double> lrd_;
};

}  // namespace oodx
