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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oodx/linalg.hpp"
#include "support/oracles.hpp"

namespace oodx {
namespace {

using testing::TestRng;

Matrix FromRows(const std::vector<std::vector<float>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

MatrixD FromRowsD(const std::vector<std::vector<double>>& rows) {
  MatrixD m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

TEST(CenteredCovariance, TwoClassesHandExample) {
  const Matrix x = FromRows({{0, 0}, {2, 0}, {0, 2}, {2, 2}});
  const Matrix mu = FromRows({{1, 0}, {1, 2}});
  const std::vector<int> cls = {0, 0, 1, 1};
  const MatrixD s = CenteredCovariance(x, mu, cls);
  EXPECT_EQ(s, FromRowsD({{1, 0}, {0, 0}}));
}

TEST(CenteredCovariance, RowsAtCentroidGiveZero) {
  const Matrix x = FromRows({{1, 2, 3}, {1, 2, 3}});
  const MatrixD s = CenteredCovariance(x, FromRows({{1, 2, 3}}), std::vector<int>{0, 0});
  EXPECT_EQ(s, MatrixD(3, 3));
}

TEST(CenteredCovariance, OneDimensional) {
  const MatrixD s =
      CenteredCovariance(FromRows({{0}, {2}}), FromRows({{1}}), std::vector<int>{0, 0});
  EXPECT_EQ(s(0, 0), 1.0);
}

TEST(CenteredCovariance, Errors) {
  const std::vector<int> none;
  try {
    CenteredCovariance(Matrix(0, 2), FromRows({{0, 0}}), none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  try {
    CenteredCovariance(FromRows({{0, 0}}), FromRows({{0, 0, 0}}), std::vector<int>{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
  EXPECT_THROW(CenteredCovariance(FromRows({{0, 0}}), FromRows({{0, 0}}), std::vector<int>{1}),
               Error);
}

TEST(CenteredCovariance, ExactlySymmetric) {
  TestRng rng(7);
  Matrix x(300, 9);
  std::vector<int> cls(300);
  for (std::size_t r = 0; r < 300; ++r) {
    cls[r] = static_cast<int>(r % 3);
    for (std::size_t c = 0; c < 9; ++c) x(r, c) = static_cast<float>(rng.Normal() * 3.0);
  }
  Matrix mu(3, 9);
  const MatrixD s = CenteredCovariance(x, mu, cls);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) EXPECT_EQ(s(i, j), s(j, i));
  }
}

TEST(Shrink, TraceScaledRidge) {
  const MatrixD s = Shrink(FromRowsD({{1, 0}, {0, 0}}), 0.1);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.05);
  EXPECT_DOUBLE_EQ(s(1, 1), 0.05);
  EXPECT_EQ(s(0, 1), 0.0);
}

TEST(Shrink, ZeroEpsilonIsIdentity) {
  const MatrixD sigma = FromRowsD({{2, 0.5}, {0.5, 3}});
  EXPECT_EQ(Shrink(sigma, 0.0), sigma);
}

TEST(Shrink, ZeroTraceFallsBackToAbsoluteRidge) {
  const MatrixD s = Shrink(MatrixD(2, 2), 0.1);
  EXPECT_EQ(s, FromRowsD({{0.1, 0}, {0, 0.1}}));
}

TEST(Shrink, NegativeEpsilonRejected) {
  try {
    Shrink(MatrixD::Identity(2), -1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(Shrink, PivotBoundOnRandomPsd) {
  TestRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = rng.Range(2, 24);
    const std::size_t rank = rng.Range(1, d);
    MatrixD b(d, rank);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < rank; ++j) b(i, j) = rng.Normal();
    }
    MatrixD sigma(d, d);
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t t = 0; t < rank; ++t) sigma(i, j) += b(i, t) * b(j, t);
      }
      trace += sigma(i, i);
    }
    const double eps = 1e-2;
    const Cholesky chol = Cholesky::Factorize(Shrink(sigma, eps));
    // Every squared pivot is at least the smallest eigenvalue.
    const double floor = eps * trace / static_cast<double>(d);
    EXPECT_GE(chol.min_pivot(), floor * (1.0 - 1e-9));
  }
}

TEST(SpdSolve, HandExamples) {
  EXPECT_EQ(SpdSolve(MatrixD::Identity(2), std::vector<double>{3, 4}),
            (std::vector<double>{3, 4}));
  const auto d = SpdSolve(FromRowsD({{2, 0}, {0, 4}}), std::vector<double>{2, 4});
  EXPECT_NEAR(d[0], 1.0, 1e-12);
  EXPECT_NEAR(d[1], 1.0, 1e-12);
  const auto v = SpdSolve(FromRowsD({{2, 1}, {1, 2}}), std::vector<double>{3, 3});
  EXPECT_NEAR(v[0], 1.0, 1e-12);
  EXPECT_NEAR(v[1], 1.0, 1e-12);
}

TEST(SpdSolve, SingularMatrixSuggestsShrinkage) {
  try {
    SpdSolve(FromRowsD({{1, 0}, {0, 0}}), std::vector<double>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularMatrix);
    EXPECT_NE(std::string(e.what()).find("shrinkage"), std::string::npos);
  }
}

TEST(SpdSolve, RoundTripOnRandomSpdUpTo256) {
  TestRng rng(3);
  for (std::size_t d : {1u, 2u, 7u, 33u, 128u, 256u}) {
    MatrixD a(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.Normal();
    }
    MatrixD sigma(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) s += a(i, t) * a(j, t);
        sigma(i, j) = s;
      }
      sigma(i, i) += 1e-2 * static_cast<double>(d);
    }
    std::vector<double> b(d);
    for (auto& v : b) v = rng.Normal();
    const auto x = SpdSolve(sigma, b);
    double res = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += sigma(i, j) * x[j];
      res += (s - b[i]) * (s - b[i]);
      nb += b[i] * b[i];
    }
    EXPECT_LE(std::sqrt(res), 1e-4 * std::sqrt(nb)) << "d=" << d;
  }
}

TEST(L2NormalizeRows, Examples) {
  const auto out = L2NormalizeRows(FromRows({{3, 4}, {0, 0}, {1, 0}}));
  EXPECT_FLOAT_EQ(out.rows(0, 0), 0.6f);
  EXPECT_FLOAT_EQ(out.rows(0, 1), 0.8f);
  EXPECT_EQ(out.rows(1, 0), 0.0f);
  EXPECT_EQ(out.rows(1, 1), 0.0f);
  EXPECT_EQ(out.rows(2, 0), 1.0f);
  EXPECT_EQ(out.rows(2, 1), 0.0f);
  ASSERT_TRUE(out.has_warning());
  EXPECT_EQ(out.zero_rows, std::vector<std::size_t>{1});
}

TEST(L2NormalizeRows, IdempotentAndUnitNorm) {
  TestRng rng(5);
  Matrix x(200, 17);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      x(r, c) = static_cast<float>(rng.Normal() * std::pow(10.0, rng.Uniform(-3, 3)));
    }
  }
  const auto once = L2NormalizeRows(x);
  const auto twice = L2NormalizeRows(once.rows);
  EXPECT_EQ(once.rows, twice.rows);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double sq = 0.0;
    for (float v : once.rows.row(r)) sq += static_cast<double>(v) * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
}

TEST(DenseMatrix, RejectsWrongDataLength) {
  EXPECT_THROW(Matrix(2, 2, std::vector<float>(3)), Error);
}

TEST(DenseMatrix, FiniteCheck) {
  Matrix m(1, 2);
  EXPECT_TRUE(m.AllFinite());
  m(0, 1) = std::nanf("");
  EXPECT_FALSE(m.AllFinite());
}

}  // namespace
}  // namespace oodx
