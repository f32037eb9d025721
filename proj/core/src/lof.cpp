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

#include <algorithm>
#include <cmath>

#include "oodx/detectors.hpp"
#include "oodx/parallel.hpp"

namespace oodx {

namespace {

bool Closer(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

std::vector<Neighbor> KNearest(const Matrix& train, std::span<const float> q,
                               std::size_t k, std::ptrdiff_t exclude) {
  std::vector<Neighbor> all;
  all.reserve(train.rows());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    if (static_cast<std::ptrdiff_t>(r) == exclude) continue;
    all.push_back({EuclideanDistance(q, train.row(r)), r});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take),
                    all.end(), Closer);
  all.resize(take);
  return all;
}

double ReachabilityDensity(std::span<const Neighbor> neighbors,
                           const std::vector<double>& k_distances) {
  double sum = 0.0;
  for (const auto& nb : neighbors) sum += std::max(k_distances[nb.index], nb.distance);
  const double mean = sum / static_cast<double>(neighbors.size());
  return 1.0 / std::max(mean, kLofZeroDistanceEpsilon);
}

}  // namespace

LofModel::LofModel(Matrix train, int k, bool normalize, std::vector<double> kdist,
                   std::vector<double> lrd)
    : train_(std::move(train)),
      k_(k),
      normalize_(normalize),
      k_distances_(std::move(kdist)),
      lrd_(std::move(lrd)) {}

LofModel LofModel::Fit(const FeatureSet& train, LofOptions options) {
  train.Validate();
  if (options.k < 1) throw InvalidInput("LOF neighbour count must be at least 1");
  if (static_cast<std::size_t>(options.k) >= train.size()) {
    throw InvalidInput("LOF neighbour count k=" + std::to_string(options.k) +
                       " must be smaller than the " + std::to_string(train.size()) +
                       " training rows");
  }
  Matrix rows = options.normalize ? L2NormalizeRows(train.features).rows
                                  : train.features;
  const std::size_t n = rows.rows();
  const auto k = static_cast<std::size_t>(options.k);

  std::vector<std::vector<Neighbor>> neighbors(n);
  ParallelFor(n, options.threads, [&](std::size_t p) {
    neighbors[p] = KNearest(rows, rows.row(p), k, static_cast<std::ptrdiff_t>(p));
  });
  std::vector<double> kdist(n);
  for (std::size_t p = 0; p < n; ++p) kdist[p] = neighbors[p].back().distance;
  std::vector<double> lrd(n);
  for (std::size_t p = 0; p < n; ++p) lrd[p] = ReachabilityDensity(neighbors[p], kdist);

  return LofModel(std::move(rows), options.k, options.normalize, std::move(kdist),
                  std::move(lrd));
}

LofModel LofModel::FromParts(Matrix train, int k, bool normalize,
                             std::vector<double> k_distances, std::vector<double> lrd) {
  if (k < 1 || static_cast<std::size_t>(k) >= train.rows()) {
    throw InvalidInput("LOF neighbour count must lie in [1, training rows)");
  }
  if (k_distances.size() != train.rows() || lrd.size() != train.rows()) {
    throw DimensionMismatch("LOF model arrays do not match the training rows");
  }
  for (double v : lrd) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("LOF model has a non-positive reachability density");
    }
  }
  return LofModel(std::move(train), k, normalize, std::move(k_distances),
                  std::move(lrd));
}

std::vector<Neighbor> LofModel::Neighbors(std::span<const float> q,
                                          std::ptrdiff_t exclude) const {
  return KNearest(train_, q, static_cast<std::size_t>(k_), exclude);
}

double LofModel::LrdOf(std::span<const Neighbor> neighbors) const {
  return ReachabilityDensity(neighbors, k_distances_);
}

double LofModel::Lof(std::span<const float> query) const {
  if (query.size() != dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(query.size()) +
                            " does not match LOF model dimension " +
                            std::to_string(dim()));
  }
  std::vector<float> q(query.begin(), query.end());
  if (normalize_) L2NormalizeInPlace(q);
  const auto nbrs = Neighbors(q, -1);
  double sum = 0.0;
  for (const auto& nb : nbrs) sum += lrd_[nb.index];
  const double mean_lrd = sum / static_cast<double>(nbrs.size());
  return mean_lrd / LrdOf(nbrs);
}

ScoreVector LofModel::ScoreBatch(const FeatureSet& queries, int threads) const {
  if (queries.size() > 0 && queries.dim() != dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(queries.dim()) +
                            " does not match LOF model dimension " +
                            std::to_string(dim()));
  }
  ScoreVector out;
  out.detector = "lof";
  out.ids = queries.ids;
  out.scores.resize(queries.size());
  out.distances.emplace(queries.size());
  ParallelFor(queries.size(), threads, [&](std::size_t r) {
    const double lof = Lof(queries.features.row(r));
    (*out.distances)[r] = lof;
    out.scores[r] = -lof;
  });
  return out;
}

std::vector<double> LofModel::TrainingLof() const {
  std::vector<double> out(size());
  for (std::size_t p = 0; p < size(); ++p) {
    const auto nbrs = Neighbors(train_.row(p), static_cast<std::ptrdiff_t>(p));
    double sum = 0.0;
    for (const auto& nb : nbrs) sum += lrd_[nb.index];
    out[p] = (sum / static_cast<double>(nbrs.size())) / lrd_[p];
  }
  return out;
}

}  // namespace oodx
