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

// Dense row-major matrices and the handful of numerical kernels the detectors
// need: pooled covariance, ridge shrinkage, Cholesky solves and row L2
// normalization. Feature data is stored as float; statistics derived from it
// (covariances, factors) are accumulated and kept in double.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oodx/error.hpp"

namespace oodx {

template <typename T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T{0}) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionMismatch("matrix data length does not equal rows*cols");
    }
  }

  static DenseMatrix Identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T> release() && { return std::move(data_); }

  bool AllFinite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = DenseMatrix<float>;
using MatrixD = DenseMatrix<double>;

extern template class DenseMatrix<float>;
extern template class DenseMatrix<double>;

// Pooled class-centered population covariance:
//   (1/N) * sum_i (x_i - mu_{class_of[i]}) (x_i - mu_{class_of[i]})^T
// The result is exactly symmetric.
MatrixD CenteredCovariance(const Matrix& features, const Matrix& class_centroids,
                           std::span<const int> class_of);

// sigma + epsilon * trace(sigma)/d * I, or sigma + epsilon * I when the trace
// is not positive.
MatrixD Shrink(const MatrixD& sigma, double epsilon);

// Lower-triangular Cholesky factor L with sigma = L L^T.
class Cholesky {
 public:
  // Throws kSingularMatrix when sigma is not numerically positive-definite.
  static Cholesky Factorize(const MatrixD& sigma);
  // Wraps an existing lower-triangular factor (e.g. one loaded from disk).
  static Cholesky FromLower(MatrixD lower);

  std::size_t dim() const { return lower_.rows(); }
  const MatrixD& lower() const { return lower_; }
  double min_pivot() const;

  // In place: x <- L^{-1} x.
  void SolveLowerInPlace(std::span<double> x) const;
  // In place: x <- L^{-T} x.
  void SolveUpperInPlace(std::span<double> x) const;
  // Returns v with (L L^T) v = rhs.
  std::vector<double> Solve(std::span<const double> rhs) const;

 private:
  explicit Cholesky(MatrixD lower) : lower_(std::move(lower)) {}
  MatrixD lower_;
};

// Solves sigma * v = rhs for symmetric positive-definite sigma.
std::vector<double> SpdSolve(const MatrixD& sigma, std::span<const double> rhs);

struct NormalizedRows {
  Matrix rows;
  // Indices of rows with zero norm; those rows are returned unchanged.
  std::vector<std::size_t> zero_rows;
  bool has_warning() const { return !zero_rows.empty(); }
};

NormalizedRows L2NormalizeRows(const Matrix& features);

// Normalizes one vector in place; returns false if its norm is zero.
bool L2NormalizeInPlace(std::span<float> v);

}  // namespace oodx
