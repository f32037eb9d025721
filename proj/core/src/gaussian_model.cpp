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

#include "oodx/gaussian_model.hpp"

#include <algorithm>
#include <limits>

#include "oodx/parallel.hpp"

namespace oodx {

GaussianModel::GaussianModel(Matrix centroids, Cholesky factor, double eps,
                             FeatureKind kind, std::size_t n)
    : centroids_(std::move(centroids)),
      factor_(std::move(factor)),
      shrinkage_epsilon_(eps),
      feature_kind_(kind),
      fit_sample_count_(n) {
  if (centroids_.cols() != factor_.dim()) {
    throw DimensionMismatch("centroid dimension does not match covariance factor");
  }
  const std::size_t d = dim();
  whitened_centroids_ = MatrixD(num_classes(), d);
  for (std::size_t c = 0; c < num_classes(); ++c) {
    auto w = whitened_centroids_.row(c);
    const auto mu = centroids_.row(c);
    for (std::size_t i = 0; i < d; ++i) w[i] = mu[i];
    factor_.SolveLowerInPlace(w);
  }
}

GaussianModel GaussianModel::Fit(const FeatureSet& train, double shrinkage_epsilon) {
  train.Validate();
  if (train.size() == 0 || train.dim() == 0) {
    throw InvalidInput("cannot fit a Gaussian model on an empty feature set");
  }
  if (!train.labels) {
    throw InvalidInput("fitting a Gaussian model requires class labels");
  }
  const auto& labels = *train.labels;
  const std::size_t num_classes = static_cast<std::size_t>(train.NumClasses());
  const std::size_t d = train.dim();

  std::vector<std::size_t> counts(num_classes, 0);
  MatrixD sums(num_classes, d);
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto c = static_cast<std::size_t>(labels[r]);
    ++counts[c];
    auto s = sums.row(c);
    const auto x = train.features.row(r);
    for (std::size_t i = 0; i < d; ++i) s[i] += x[i];
  }
  Matrix centroids(num_classes, d);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      throw InvalidInput("class " + std::to_string(c) +
                         " has no training samples; labels must be dense in [0, " +
                         std::to_string(num_classes) + ")");
    }
    for (std::size_t i = 0; i < d; ++i) {
      centroids(c, i) = static_cast<float>(sums(c, i) / static_cast<double>(counts[c]));
    }
  }

  const MatrixD sigma = Shrink(
      CenteredCovariance(train.features, centroids, labels), shrinkage_epsilon);
  return GaussianModel(std::move(centroids), Cholesky::Factorize(sigma),
                       shrinkage_epsilon, train.feature_kind, train.size());
}

GaussianModel GaussianModel::FromParts(Matrix centroids, MatrixD cholesky_lower,
                                       double shrinkage_epsilon, FeatureKind kind,
                                       std::size_t fit_sample_count) {
  if (centroids.rows() == 0) throw InvalidInput("Gaussian model with no classes");
  return GaussianModel(std::move(centroids),
                       Cholesky::FromLower(std::move(cholesky_lower)),
                       shrinkage_epsilon, kind, fit_sample_count);
}

GaussianModel::Distance GaussianModel::MahalanobisDistance(
    std::span<const float> z) const {
  const std::size_t d = dim();
  if (z.size() != d) {
    throw DimensionMismatch("feature dimension " + std::to_string(z.size()) +
                            " does not match model dimension " + std::to_string(d));
  }
  Distance best{std::numeric_limits<double>::infinity(), 0};
  std::vector<double> diff(d);
  for (std::size_t c = 0; c < num_classes(); ++c) {
    const auto mu = centroids_.row(c);
    for (std::size_t i = 0; i < d; ++i) {
      diff[i] = static_cast<double>(z[i]) - static_cast<double>(mu[i]);
    }
    factor_.SolveLowerInPlace(diff);
    double q = 0.0;
    for (double v : diff) q += v * v;
    if (q < best.value) best = {q, c};
  }
  return best;
}

ScoreVector GaussianModel::ScoreBatch(const FeatureSet& features, int threads) const {
  const std::size_t d = dim();
  if (features.size() > 0 && features.dim() != d) {
    throw DimensionMismatch("feature dimension " + std::to_string(features.dim()) +
                            " does not match model dimension " + std::to_string(d));
  }
  const std::size_t n = features.size();
  ScoreVector out;
  out.detector = "md";
  out.ids = features.ids;
  out.scores.resize(n);
  out.distances.emplace(n);

  ParallelFor(n, threads, [&](std::size_t r) {
    std::vector<double> w(d);
    const auto z = features.features.row(r);
    for (std::size_t i = 0; i < d; ++i) w[i] = z[i];
    factor_.SolveLowerInPlace(w);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < num_classes(); ++c) {
      const auto m = whitened_centroids_.row(c);
      double q = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double t = w[i] - m[i];
        q += t * t;
      }
      best = std::min(best, q);
    }
    (*out.distances)[r] = best;
    out.scores[r] = -best;
  });
  return out;
}

}  // namespace oodx
