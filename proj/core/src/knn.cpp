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
#include <queue>

#include "oodx/detectors.hpp"
#include "oodx/parallel.hpp"

namespace oodx {

namespace {

bool Closer(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

}  // namespace

double EuclideanDistance(std::span<const float> a, std::span<const float> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sq += t * t;
  }
  return std::sqrt(sq);
}

KnnIndex KnnIndex::Fit(const FeatureSet& train, int k) {
  train.Validate();
  if (k < 1) throw InvalidInput("KNN neighbour count k must be at least 1");
  if (static_cast<std::size_t>(k) > train.size()) {
    throw InvalidInput("KNN neighbour count k=" + std::to_string(k) +
                       " exceeds the " + std::to_string(train.size()) +
                       " training rows");
  }
  auto normalized = L2NormalizeRows(train.features);
  return KnnIndex(std::move(normalized.rows), k, std::move(normalized.zero_rows));
}

KnnIndex KnnIndex::FromNormalized(Matrix normalized_rows, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > normalized_rows.rows()) {
    throw InvalidInput("KNN neighbour count k must lie in [1, training rows]");
  }
  std::vector<std::size_t> zero_rows;
  for (std::size_t r = 0; r < normalized_rows.rows(); ++r) {
    const auto row = normalized_rows.row(r);
    if (std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; })) {
      zero_rows.push_back(r);
    }
  }
  return KnnIndex(std::move(normalized_rows), k, std::move(zero_rows));
}

std::vector<Neighbor> KnnIndex::Search(std::span<const float> normalized_query) const {
  if (normalized_query.size() != dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(normalized_query.size()) +
                            " does not match index dimension " + std::to_string(dim()));
  }
  const auto k = static_cast<std::size_t>(k_);
  // Max-heap on (distance, index): the top is the current worst of the best k.
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&Closer)> heap(Closer);
  for (std::size_t r = 0; r < rows_.rows(); ++r) {
    const Neighbor cand{EuclideanDistance(normalized_query, rows_.row(r)), r};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (Closer(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

double KnnIndex::Score(std::span<const float> query) const {
  if (query.size() != dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(query.size()) +
                            " does not match index dimension " + std::to_string(dim()));
  }
  std::vector<float> q(query.begin(), query.end());
  L2NormalizeInPlace(q);
  double sum = 0.0;
  for (const auto& nb : Search(q)) sum += nb.distance;
  return -sum / static_cast<double>(k_);
}

ScoreVector KnnIndex::ScoreBatch(const FeatureSet& queries, int threads) const {
  if (queries.size() > 0 && queries.dim() != dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(queries.dim()) +
                            " does not match index dimension " + std::to_string(dim()));
  }
  ScoreVector out;
  out.detector = "knn";
  out.ids = queries.ids;
  out.scores.resize(queries.size());
  out.distances.emplace(queries.size());
  ParallelFor(queries.size(), threads, [&](std::size_t r) {
    const double s = Score(queries.features.row(r));
    out.scores[r] = s;
    (*out.distances)[r] = -s;
  });
  return out;
}

}  // namespace oodx
