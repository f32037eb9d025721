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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "oodx/types.hpp"

namespace oodx::testing {

inline FeatureSet MakeFeatures(const std::vector<std::vector<float>>& rows,
                               std::optional<std::vector<int>> labels = std::nullopt,
                               std::string id_prefix = "r") {
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  FeatureSet set;
  set.features = Matrix(rows.size(), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) set.features(r, c) = rows[r][c];
  }
  set.ids = SequentialIds(rows.size(), id_prefix);
  set.labels = std::move(labels);
  return set;
}

inline LogitSet MakeLogits(const std::vector<std::vector<float>>& rows) {
  LogitSet set;
  set.logits = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) set.logits(r, c) = rows[r][c];
  }
  set.ids = SequentialIds(rows.size(), "l");
  return set;
}

// A raw distance-style score vector (scores = -distances).
inline ScoreVector MakeDistances(const std::vector<double>& d, std::string detector = "md",
                                 std::string id_prefix = "s") {
  ScoreVector v;
  v.detector = std::move(detector);
  v.ids = SequentialIds(d.size(), id_prefix);
  v.distances = d;
  for (double x : d) v.scores.push_back(-x);
  return v;
}

inline ScoreVector MakeScores(const std::vector<double>& s, std::string detector = "msp",
                              std::string id_prefix = "s") {
  ScoreVector v;
  v.detector = std::move(detector);
  v.ids = SequentialIds(s.size(), id_prefix);
  v.scores = s;
  return v;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("oodx-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteBytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace oodx::testing
