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

#include "oodx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oodx {

template <typename T>
bool DenseMatrix<T>::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](T v) { return std::isfinite(v); });
}

template class DenseMatrix<float>;
template class DenseMatrix<double>;

MatrixD CenteredCovariance(const Matrix& features, const Matrix& class_centroids,
                           std::span<const int> class_of) {
  if (features.empty() || features.cols() == 0) {
    throw InvalidInput("covariance of an empty feature matrix");
  }
  if (class_centroids.cols() != features.cols()) {
    throw DimensionMismatch("centroid dimension does not match feature dimension");
  }
  if (class_of.size() != features.rows()) {
    throw DimensionMismatch("class index count does not match feature rows");
  }
  const std::size_t d = features.cols();
  const std::size_t num_classes = class_centroids.rows();

  MatrixD cov(d, d);
  std::vector<double> diff(d);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const int c = class_of[r];
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
      throw InvalidInput("row " + std::to_string(r) + " has class index " +
                         std::to_string(c) + " outside [0, " +
                         std::to_string(num_classes) + ")");
    }
    const auto x = features.row(r);
    const auto mu = class_centroids.row(static_cast<std::size_t>(c));
    for (std::size_t i = 0; i < d; ++i) {
      diff[i] = static_cast<double>(x[i]) - static_cast<double>(mu[i]);
    }
    // Upper triangle only; mirrored below so the result is exactly symmetric.
    for (std::size_t i = 0; i < d; ++i) {
      const double di = diff[i];
      if (di == 0.0) continue;
      double* out = &cov(i, 0);
      for (std::size_t j = i; j < d; ++j) out[j] += di * diff[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(features.rows());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) *= inv_n;
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

MatrixD Shrink(const MatrixD& sigma, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("shrinkage epsilon must be a finite non-negative number");
  }
  if (sigma.rows() != sigma.cols()) {
    throw DimensionMismatch("shrinkage requires a square matrix");
  }
  MatrixD out = sigma;
  if (epsilon == 0.0 || sigma.rows() == 0) return out;

  const std::size_t d = sigma.rows();
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += sigma(i, i);
  const double ridge =
      trace > 0.0 ? epsilon * trace / static_cast<double>(d) : epsilon;
  for (std::size_t i = 0; i < d; ++i) out(i, i) += ridge;
  return out;
}

Cholesky Cholesky::Factorize(const MatrixD& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw DimensionMismatch("Cholesky factorization requires a square matrix");
  }
  const std::size_t d = sigma.rows();
  if (d == 0) throw InvalidInput("Cholesky factorization of an empty matrix");

  double max_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, sigma(i, i));
  // Pivots below this are treated as rank deficiency, not rounding noise.
  const double pivot_floor = max_diag * 1e-13;

  MatrixD lower(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = sigma(j, j);
    const auto lj = lower.row(j);
    for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
    if (!(diag > pivot_floor) || !std::isfinite(diag)) {
      std::ostringstream msg;
      msg << "covariance is not positive-definite (pivot " << j << " = " << diag
          << "); raise the shrinkage epsilon (--shrinkage)";
      throw Error(ErrorKind::kSingularMatrix, msg.str());
    }
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      const auto li = lower.row(i);
      double s = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      lower(i, j) = s / ljj;
    }
  }
  return Cholesky(std::move(lower));
}

Cholesky Cholesky::FromLower(MatrixD lower) {
  if (lower.rows() != lower.cols() || lower.rows() == 0) {
    throw DimensionMismatch("Cholesky factor must be a non-empty square matrix");
  }
  for (std::size_t i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) {
      throw Error(ErrorKind::kSingularMatrix,
                  "Cholesky factor has a non-positive diagonal entry");
    }
    for (std::size_t j = i + 1; j < lower.cols(); ++j) lower(i, j) = 0.0;
  }
  return Cholesky(std::move(lower));
}

double Cholesky::min_pivot() const {
  double m = lower_(0, 0);
  for (std::size_t i = 1; i < dim(); ++i) m = std::min(m, lower_(i, i));
  return m * m;
}

void Cholesky::SolveLowerInPlace(std::span<double> x) const {
  const std::size_t d = dim();
  if (x.size() != d) throw DimensionMismatch("solve: right-hand side length mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    const auto li = lower_.row(i);
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
}

void Cholesky::SolveUpperInPlace(std::span<double> x) const {
  const std::size_t d = dim();
  if (x.size() != d) throw DimensionMismatch("solve: right-hand side length mismatch");
  for (std::size_t ii = d; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < d; ++k) s -= lower_(k, ii) * x[k];
    x[ii] = s / lower_(ii, ii);
  }
}

std::vector<double> Cholesky::Solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  SolveLowerInPlace(x);
  SolveUpperInPlace(x);
  return x;
}

std::vector<double> SpdSolve(const MatrixD& sigma, std::span<const double> rhs) {
  if (rhs.size() != sigma.rows()) {
    throw DimensionMismatch("solve: right-hand side length mismatch");
  }
  return Cholesky::Factorize(sigma).Solve(rhs);
}

bool L2NormalizeInPlace(std::span<float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  if (sq == 0.0) return false;
  // Already unit length up to float rounding; leave it so that normalizing
  // twice is the identity.
  if (std::abs(sq - 1.0) <= 1e-6) return true;
  const double norm = std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
  return true;
}

NormalizedRows L2NormalizeRows(const Matrix& features) {
  NormalizedRows out{features, {}};
  for (std::size_t r = 0; r < out.rows.rows(); ++r) {
    if (!L2NormalizeInPlace(out.rows.row(r))) out.zero_rows.push_back(r);
  }
  return out;
}

}  // namespace oodx
