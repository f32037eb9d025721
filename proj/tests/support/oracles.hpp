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

// Reference implementations used only by tests. Each one follows the
// textbook definition directly and shares no code with the engine.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oodx::testing {

// Seeded generator with hand-written distributions, so instances are the
// same on every standard library.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::size_t Range(std::size_t lo, std::size_t hi) { return lo + Index(hi - lo + 1); }
  double Normal() {
    double u = Uniform();
    while (u <= 0.0) u = Uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * Uniform());
  }
  bool Coin(double p = 0.5) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Pairwise Mann-Whitney count with half credit for ties.
inline double PairwiseAuroc(const std::vector<double>& id, const std::vector<double>& ood) {
  double wins = 0.0;
  for (double a : id) {
    for (double b : ood) {
      if (a > b) wins += 1.0;
      else if (a == b) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

struct SweepResult {
  double far;
  double gamma;
};

// Tries every observed ID score as a threshold and keeps the largest one
// that still accepts at least 95% of ID samples.
inline SweepResult SweepFar95(const std::vector<double>& id, const std::vector<double>& ood) {
  double best = -std::numeric_limits<double>::infinity();
  for (double t : id) {
    std::size_t accepted = 0;
    for (double s : id) accepted += s >= t ? 1 : 0;
    if (100 * accepted >= 95 * id.size() && t > best) best = t;
  }
  std::size_t false_accepts = 0;
  for (double s : ood) false_accepts += s >= best ? 1 : 0;
  return {static_cast<double>(false_accepts) / static_cast<double>(ood.size()), best};
}

using Rows = std::vector<std::vector<float>>;

inline double Distance(const std::vector<float>& a, const std::vector<float>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sq += t * t;
  }
  return std::sqrt(sq);
}

// Distances to every row, fully sorted by (distance, index).
inline std::vector<std::pair<double, std::size_t>> SortedDistances(
    const Rows& train, const std::vector<float>& q, std::ptrdiff_t skip = -1) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (static_cast<std::ptrdiff_t>(r) == skip) continue;
    all.emplace_back(Distance(q, train[r]), r);
  }
  std::sort(all.begin(), all.end());
  return all;
}

// Mean distance to the k nearest rows; rows and query as given.
inline double BruteKnnMeanDistance(const Rows& train, const std::vector<float>& q,
                                   std::size_t k) {
  const auto all = SortedDistances(train, q);
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += all[j].first;
  return sum / static_cast<double>(k);
}

// O(n^2) local outlier factor over a full distance matrix.
class ReferenceLof {
 public:
  ReferenceLof(Rows train, std::size_t k) : train_(std::move(train)), k_(k) {
    const std::size_t n = train_.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dist[i][j] = Distance(train_[i], train_[j]);
    }
    neighbors_.resize(n);
    kdist_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> order;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) order.push_back(j);
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return dist[i][a] < dist[i][b]; });
      order.resize(k_);
      neighbors_[i] = order;
      kdist_[i] = dist[i][order.back()];
    }
    lrd_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double reach = 0.0;
      for (std::size_t o : neighbors_[i]) reach += std::max(kdist_[o], dist[i][o]);
      lrd_[i] = 1.0 / std::max(reach / static_cast<double>(k_), 1e-12);
    }
  }

  double Lof(const std::vector<float>& q) const {
    std::vector<std::size_t> order(train_.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d(train_.size());
    for (std::size_t j = 0; j < train_.size(); ++j) d[j] = Distance(q, train_[j]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    double reach = 0.0;
    double lrd_sum = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      reach += std::max(kdist_[order[j]], d[order[j]]);
      lrd_sum += lrd_[order[j]];
    }
    const double lrd_q = 1.0 / std::max(reach / static_cast<double>(k_), 1e-12);
    return (lrd_sum / static_cast<double>(k_)) / lrd_q;
  }

  // LOF of training point i with itself excluded from its neighbourhood.
  double TrainingLof(std::size_t i) const {
    double lrd_sum = 0.0;
    for (std::size_t o : neighbors_[i]) lrd_sum += lrd_[o];
    return (lrd_sum / static_cast<double>(k_)) / lrd_[i];
  }

  const std::vector<double>& lrd() const { return lrd_; }
  const std::vector<double>& k_distances() const { return kdist_; }

 private:
  Rows train_;
  std::size_t k_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<double> kdist_;
  std::vector<double> lrd_;
};

// Mahalanobis distance by Gauss-Jordan inversion of sigma, scalar loops only.
inline double ReferenceMahalanobis(const std::vector<std::vector<double>>& sigma,
                                   const std::vector<std::vector<double>>& centroids,
                                   const std::vector<double>& z) {
  const std::size_t d = sigma.size();
  std::vector<std::vector<double>> a(d, std::vector<double>(2 * d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = sigma[i][j];
    a[i][d + i] = 1.0;
  }
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    const double p = a[c][c];
    for (auto& v : a[c]) v /= p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < 2 * d; ++j) a[r][j] -= f * a[c][j];
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mu : centroids) {
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        q += (z[i] - mu[i]) * a[i][d + j] * (z[j] - mu[j]);
      }
    }
    best = std::min(best, q);
  }
  return best;
}

}  // namespace oodx::testing
