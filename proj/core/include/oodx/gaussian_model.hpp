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

#include <span>

#include "oodx/linalg.hpp"
#include "oodx/types.hpp"

namespace oodx {

inline constexpr double kDefaultShrinkage = 1e-3;

// Class centroids plus a shared (shrunk) covariance, held as its Cholesky
// factor. Immutable once fitted; scoring is safe from many threads.
class GaussianModel {
 public:
  // Fits centroids and the pooled class-centered covariance on labelled
  // training features. Labels must be dense in [0, C).
  static GaussianModel Fit(const FeatureSet& train,
                           double shrinkage_epsilon = kDefaultShrinkage);

  // Reassembles a model from persisted parts.
  static GaussianModel FromParts(Matrix centroids, MatrixD cholesky_lower,
                                 double shrinkage_epsilon, FeatureKind kind,
                                 std::size_t fit_sample_count);

  std::size_t num_classes() const { return centroids_.rows(); }
  std::size_t dim() const { return centroids_.cols(); }
  const Matrix& centroids() const { return centroids_; }
  const Cholesky& factor() const { return factor_; }
  double shrinkage_epsilon() const { return shrinkage_epsilon_; }
  FeatureKind feature_kind() const { return feature_kind_; }
  std::size_t fit_sample_count() const { return fit_sample_count_; }

  // min_c (z - mu_c)^T Sigma^{-1} (z - mu_c), with the argmin class.
  struct Distance {
    double value;
    std::size_t nearest_class;
  };
  Distance MahalanobisDistance(std::span<const float> z) const;

  // S(x) = -MD(x).
  double Score(std::span<const float> z) const {
    return -MahalanobisDistance(z).value;
  }

  // Vectorized scoring; detector tag "md". `threads` <= 1 runs inline.
  ScoreVector ScoreBatch(const FeatureSet& features, int threads = 1) const;

 private:
  GaussianModel(Matrix centroids, Cholesky factor, double eps, FeatureKind kind,
                std::size_t n);

  Matrix centroids_;
  Cholesky factor_;
  // L^{-1} mu_c per class, used by the batch path.
  MatrixD whitened_centroids_;
  double shrinkage_epsilon_;
  FeatureKind feature_kind_;
  std::size_t fit_sample_count_;
};

}  // namespace oodx
