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

#include "oodx/fusion.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace oodx {
namespace {

using testing::MakeDistances;
using testing::MakeFeatures;
using testing::MakeScores;
using testing::TestRng;

CalibrationStats Stats(double mean, double std) {
  CalibrationStats s;
  s.mean = mean;
  s.std = std;
  s.min = mean - 1;
  s.max = mean + 1;
  s.n = 10;
  return s;
}

TEST(Calibrate, PopulationMoments) {
  const std::vector<double> v = {1, 2, 3};
  const auto s = Calibrate(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.std, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.std, 0.8165, 1e-4);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 3.0);
  EXPECT_EQ(s.n, 3u);
}

TEST(Calibrate, ConstantValuesAreDegenerate) {
  const std::vector<double> v = {5, 5, 5};
  try {
    Calibrate(v);
    FAIL();
  } catch (const DegenerateCalibration& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateCalibration);
    EXPECT_EQ(e.stats().mean, 5.0);
    EXPECT_EQ(e.stats().std, 0.0);
    EXPECT_EQ(Normalize(7.0, e.stats(), NormalizationMode::kStandardize).value, 0.0);
    EXPECT_TRUE(Normalize(7.0, e.stats(), NormalizationMode::kStandardize).degenerate);
  }
}

TEST(Calibrate, SingleValueRejected) {
  const std::vector<double> v = {5};
  try {
    Calibrate(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(Calibrate, UsesRawDistancesOfScoreVector) {
  const auto s = Calibrate(MakeDistances({1, 2, 3}, "md_pre"));
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_EQ(s.detector, "md_pre");
  const auto t = Calibrate(MakeScores({-1, -2, -3}, "knn"));
  EXPECT_DOUBLE_EQ(t.mean, 2.0);
}

TEST(Calibrate, StandardizedCalibrationSplitHasZeroMeanUnitStd) {
  TestRng rng(4);
  std::vector<double> v(5000);
  for (auto& x : v) x = 1e3 + 40 * rng.Normal();
  const auto s = Calibrate(v);
  double m = 0, q = 0;
  for (double x : v) m += Normalize(x, s, NormalizationMode::kStandardize).value;
  m /= static_cast<double>(v.size());
  for (double x : v) {
    const double z = Normalize(x, s, NormalizationMode::kStandardize).value - m;
    q += z * z;
  }
  EXPECT_LE(std::abs(m), 1e-5);
  EXPECT_LE(std::abs(std::sqrt(q / static_cast<double>(v.size())) - 1.0), 1e-5);
}

TEST(CalibrationStats, JsonRoundTrip) {
  CalibrationStats s = Stats(3.5, 0.25);
  s.detector = "md_ft";
  s.mode = NormalizationMode::kMinMax;
  const auto j = s.ToJson();
  for (const char* key : {"mean", "std", "min", "max", "detector", "split", "n"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto back = CalibrationStats::FromJson(j);
  EXPECT_EQ(back.mean, s.mean);
  EXPECT_EQ(back.std, s.std);
  EXPECT_EQ(back.min, s.min);
  EXPECT_EQ(back.max, s.max);
  EXPECT_EQ(back.detector, "md_ft");
  EXPECT_EQ(back.n, 10u);
  EXPECT_EQ(back.mode, NormalizationMode::kMinMax);
}

TEST(CalibrationStats, MalformedJsonRejected) {
  EXPECT_THROW(CalibrationStats::FromJson(nlohmann::json{{"std", 1}}), Error);
  EXPECT_THROW(CalibrationStats::FromJson(nlohmann::json{{"mean", 1}, {"std", -1}, {"n", 2}}),
               Error);
}

TEST(Normalize, Examples) {
  EXPECT_DOUBLE_EQ(Normalize(12, Stats(10, 2), NormalizationMode::kStandardize).value, 1.0);
  EXPECT_EQ(Normalize(10, Stats(10, 2), NormalizationMode::kStandardize).value, 0.0);
  CalibrationStats mm;
  mm.min = 0;
  mm.max = 4;
  mm.mean = 2;
  mm.std = 1;
  EXPECT_DOUBLE_EQ(Normalize(1, mm, NormalizationMode::kMinMax).value, 0.25);
  EXPECT_DOUBLE_EQ(Normalize(9, mm, NormalizationMode::kMinMax).value, 2.25);
  EXPECT_EQ(Normalize(9, mm, NormalizationMode::kNone).value, 9.0);
}

TEST(Normalize, ScaleInvariance) {
  TestRng rng(17);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(50);
    for (auto& x : v) x = std::abs(rng.Normal()) * 10;
    const double alpha = std::pow(10.0, rng.Uniform(-3, 3));
    std::vector<double> w;
    for (double x : v) w.push_back(alpha * x);
    const auto a = Calibrate(v);
    const auto b = Calibrate(w);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(Normalize(v[i], a, NormalizationMode::kStandardize).value,
                  Normalize(w[i], b, NormalizationMode::kStandardize).value, 1e-6);
    }
  }
}

TEST(Aggregator, ParseAndValidate) {
  EXPECT_EQ(Aggregator::Parse("mean").kind, Aggregator::Kind::kMean);
  EXPECT_EQ(Aggregator::Parse("max").kind, Aggregator::Kind::kMax);
  const auto w = Aggregator::Parse("weighted:0.25,0.75");
  EXPECT_EQ(w.kind, Aggregator::Kind::kWeighted);
  EXPECT_EQ(w.weights, (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(Aggregator::Parse(w.ToString()).weights, w.weights);
  EXPECT_THROW(Aggregator::Parse("median"), Error);
  EXPECT_THROW(Aggregator::Parse("weighted:0.5,0.6"), Error);
  EXPECT_THROW(Aggregator::Parse("weighted:-0.5,1.5"), Error);
  EXPECT_THROW(Aggregator::Parse("weighted:a,b"), Error);
}

TEST(Gnome, HandExample) {
  const auto pre = MakeDistances({12});
  const auto ft = MakeDistances({80});
  const auto s = Gnome(pre, ft, Stats(10, 2), Stats(100, 20));
  EXPECT_EQ(s.detector, "gnome");
  EXPECT_DOUBLE_EQ(s.scores[0], 0.0);
}

TEST(Gnome, EqualComponents) {
  const auto pre = MakeDistances({12});
  const auto ft = MakeDistances({14});
  for (const auto& agg : {Aggregator::Mean(), Aggregator::Max()}) {
    const auto s = Gnome(pre, ft, Stats(10, 2), Stats(10, 4), {agg, NormalizationMode::kStandardize});
    EXPECT_DOUBLE_EQ(s.scores[0], -1.0);
  }
}

TEST(Gnome, MaxPicksLargerDistance) {
  const auto s = Gnome(MakeDistances({14}), MakeDistances({10}), Stats(10, 2), Stats(10, 2),
                       {Aggregator::Max(), NormalizationMode::kStandardize});
  EXPECT_DOUBLE_EQ(s.scores[0], -2.0);
  ASSERT_TRUE(s.distances);
  EXPECT_DOUBLE_EQ((*s.distances)[0], 2.0);
}

TEST(Gnome, Weighted) {
  const auto s = Gnome(MakeDistances({14}), MakeDistances({10}), Stats(10, 2), Stats(10, 2),
                       {Aggregator::Weighted({0.25, 0.75}), NormalizationMode::kStandardize});
  EXPECT_DOUBLE_EQ(s.scores[0], -0.5);
}

TEST(Gnome, IdMismatch) {
  try {
    Gnome(MakeDistances({1, 2}, "md", "a"), MakeDistances({1, 2}, "md", "b"), Stats(0, 1),
          Stats(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlignmentError);
  }
}

TEST(Gnome, SymmetricAndRankPreserving) {
  TestRng rng(30);
  std::vector<double> a(200), b(200);
  for (auto& x : a) x = std::abs(rng.Normal()) * 5;
  for (auto& x : b) x = std::abs(rng.Normal()) * 50;
  const auto sa = Calibrate(a), sb = Calibrate(b);
  const auto ab = Gnome(MakeDistances(a), MakeDistances(b), sa, sb);
  const auto ba = Gnome(MakeDistances(b), MakeDistances(a), sb, sa);
  EXPECT_EQ(ab.scores, ba.scores);

  const auto same = Gnome(MakeDistances(a), MakeDistances(a), sa, sa);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (-a[i] < -a[j]) EXPECT_LT(same.scores[i], same.scores[j]);
    }
  }
}

TEST(Gnome, RecordsComponentsAndAggregator) {
  auto pre = MakeDistances({1, 2}, "md_pre");
  auto ft = MakeDistances({1, 2}, "md_ft");
  const auto s = Gnome(pre, ft, Stats(0, 1), Stats(0, 1), {Aggregator::Max(), NormalizationMode::kStandardize});
  EXPECT_EQ(s.components, (std::vector<std::string>{"md_pre", "md_ft"}));
  EXPECT_EQ(s.aggregator, "max");
  EXPECT_EQ(s.calibration, Calibration::kStandardize);
}

TEST(FuseScores, ThreeComponents) {
  const std::vector<ScoreVector> parts = {MakeDistances({12}), MakeDistances({10}),
                                          MakeDistances({16})};
  const std::vector<CalibrationStats> stats = {Stats(10, 2), Stats(10, 2), Stats(10, 2)};
  const auto s = FuseScores(parts, stats, {});
  EXPECT_DOUBLE_EQ(s.scores[0], -4.0 / 3.0);
  EXPECT_THROW(FuseScores(std::span(parts).first(1), std::span(stats).first(1), {}), Error);
}

TEST(FeatureFuse, ConcatAndAverage) {
  const auto a = MakeFeatures({{1, 2}});
  const auto b = MakeFeatures({{3, 4}});
  const auto c = FeatureFuse(a, b, FeatureFusionMode::kConcat);
  ASSERT_EQ(c.dim(), 4u);
  EXPECT_EQ(std::vector<float>(c.features.row(0).begin(), c.features.row(0).end()),
            (std::vector<float>{1, 2, 3, 4}));
  const auto m = FeatureFuse(a, b, FeatureFusionMode::kAverage);
  EXPECT_EQ(std::vector<float>(m.features.row(0).begin(), m.features.row(0).end()),
            (std::vector<float>{2, 3}));
}

TEST(FeatureFuse, Errors) {
  const auto a = MakeFeatures({{1, 2}, {3, 4}});
  auto swapped = a;
  std::swap(swapped.ids[0], swapped.ids[1]);
  try {
    FeatureFuse(a, swapped, FeatureFusionMode::kConcat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlignmentError);
  }
  try {
    FeatureFuse(a, MakeFeatures({{1, 2, 3}, {4, 5, 6}}), FeatureFusionMode::kAverage);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST(EnsembleSum, Examples) {
  const std::vector<ScoreVector> two = {MakeScores({1, 2}), MakeScores({3, 4})};
  EXPECT_EQ(EnsembleSum(two).scores, (std::vector<double>{4, 6}));
  const std::vector<ScoreVector> copies(5, MakeScores({1.5, -2}));
  EXPECT_EQ(EnsembleSum(copies).scores, (std::vector<double>{7.5, -10}));
}

TEST(EnsembleSum, MatchesLoopAndRejectsMisalignment) {
  TestRng rng(40);
  std::vector<ScoreVector> parts;
  for (int k = 0; k < 4; ++k) {
    std::vector<double> v(100);
    for (auto& x : v) x = rng.Normal();
    parts.push_back(MakeScores(v));
  }
  const auto sum = EnsembleSum(parts);
  for (std::size_t i = 0; i < 100; ++i) {
    double s = 0;
    for (const auto& p : parts) s += p.scores[i];
    EXPECT_EQ(sum.scores[i], s);
  }
  parts.push_back(MakeScores(std::vector<double>(100), "msp", "other"));
  try {
    EnsembleSum(parts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlignmentError);
  }
}

}  // namespace
}  // namespace oodx
