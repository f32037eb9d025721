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

// On-disk formats.
//
// Container (.oodx), all integers little-endian:
//   bytes 0..3   magic "OODX"
//   u16          format version (1)
//   u32          manifest length in bytes
//   ...          UTF-8 JSON manifest
//   ...          payload: little-endian, row-major blocks
//
// The manifest always carries "kind", "crc32" (CRC-32 of the payload bytes)
// and "blocks": [{"name", "rows", "cols", "dtype"}, ...]. dtype is "float32"
// (the default when omitted) or "float64". The payload is the concatenation
// of the blocks in manifest order, so its byte length must equal
// sum(rows * cols * width).
//
// Token log-probabilities are ragged and live in JSON Lines instead:
//   {"id": "...", "logprobs": [-1.2, -0.3, ...]}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodx/detectors.hpp"
#include "oodx/gaussian_model.hpp"
#include "oodx/types.hpp"

namespace oodx {

inline constexpr std::uint16_t kContainerVersion = 1;

namespace kinds {
inline constexpr std::string_view kFeatureSet = "feature-set";
inline constexpr std::string_view kLogitSet = "logit-set";
inline constexpr std::string_view kScoreVector = "score-vector";
inline constexpr std::string_view kGaussianModel = "gaussian-model";
inline constexpr std::string_view kKnnIndex = "knn-index";
inline constexpr std::string_view kLofModel = "lof-model";
}  // namespace kinds

bool IsKnownKind(std::string_view kind);

enum class DType { kFloat32, kFloat64 };

struct BlockInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  DType dtype = DType::kFloat32;
  std::size_t offset = 0;  // byte offset into the payload

  std::size_t bytes() const { return rows * cols * (dtype == DType::kFloat32 ? 4 : 8); }
};

// Manifest plus raw little-endian payload bytes.
struct Container {
  nlohmann::json manifest;
  std::vector<std::uint8_t> payload;

  std::string kind() const;
  std::vector<BlockInfo> Blocks() const;
  bool HasBlock(std::string_view name) const;
  // A float32 block. Throws kMalformedContainer for other dtypes or when
  // the block is missing.
  Matrix FloatBlock(std::string_view name) const;
  // A float32 or float64 block, widened to double.
  MatrixD DoubleBlock(std::string_view name) const;

  friend bool operator==(const Container&, const Container&) = default;
};

// Accumulates blocks and produces a finished container (kind, blocks, crc32
// filled into the manifest).
class ContainerBuilder {
 public:
  ContainerBuilder(std::string_view kind, nlohmann::json manifest);
  ContainerBuilder& Add(std::string name, const Matrix& m);
  ContainerBuilder& Add(std::string name, const MatrixD& m);
  // Moves the accumulated state out; the builder is empty afterwards.
  Container Build();

 private:
  nlohmann::json manifest_;
  nlohmann::json blocks_ = nlohmann::json::array();
  std::vector<std::uint8_t> payload_;
};

std::string EncodeContainer(const Container& container);
Container DecodeContainer(std::string_view bytes);

void WriteContainer(const std::filesystem::path& path, const Container& container);
Container ReadContainer(const std::filesystem::path& path);

std::uint32_t Crc32(std::span<const std::uint8_t> bytes);

// --- typed readers / writers ------------------------------------------------

Container ToContainer(const FeatureSet& set);
FeatureSet FeatureSetFromContainer(const Container& c);
void WriteFeatureSet(const std::filesystem::path& path, const FeatureSet& set);
FeatureSet ReadFeatureSet(const std::filesystem::path& path);

void WriteLogitSet(const std::filesystem::path& path, const LogitSet& set);
LogitSet ReadLogitSet(const std::filesystem::path& path);

void WriteScoreVector(const std::filesystem::path& path, const ScoreVector& scores);
ScoreVector ReadScoreVector(const std::filesystem::path& path);

void WriteGaussianModel(const std::filesystem::path& path, const GaussianModel& model);
GaussianModel ReadGaussianModel(const std::filesystem::path& path);

void WriteKnnIndex(const std::filesystem::path& path, const KnnIndex& index);
KnnIndex ReadKnnIndex(const std::filesystem::path& path);

void WriteLofModel(const std::filesystem::path& path, const LofModel& model);
LofModel ReadLofModel(const std::filesystem::path& path);

void WriteTokenLogProbs(const std::filesystem::path& path, const TokenLogProbSet& set);
TokenLogProbSet ReadTokenLogProbs(const std::filesystem::path& path);

// Pretty-printed JSON with a trailing newline.
void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json ReadJson(const std::filesystem::path& path);

// --- benchmark pairs --------------------------------------------------------

enum class ShiftType { kNss, kSs, kCrossTask, kUnknown };

std::string_view ShiftTypeName(ShiftType t);
ShiftType ParseShiftType(std::string_view name);

// Feature files for one representation space.
struct SpaceRefs {
  std::filesystem::path train;
  std::filesystem::path val;
  std::filesystem::path id_test;
  std::filesystem::path ood_test;
};

struct SplitRefs {
  std::filesystem::path val;  // optional
  std::filesystem::path id_test;
  std::filesystem::path ood_test;
};

// One ID/OOD benchmark pair. Paths are stored relative to `base_dir` (the
// directory holding the .pair.json file).
struct PairConfig {
  std::string name;
  ShiftType shift_type = ShiftType::kUnknown;
  SpaceRefs pre;
  SpaceRefs ft;
  std::optional<SplitRefs> logits;
  std::optional<SplitRefs> tokens;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;

  nlohmann::json ToJson() const;
  static PairConfig FromJson(const nlohmann::json& j,
                             std::filesystem::path base_dir);
};

PairConfig ReadPairConfig(const std::filesystem::path& path);
void WritePairConfig(const std::filesystem::path& path, const PairConfig& config);

struct PairIssue {
  std::string code;  // missing-file, unreadable, dim-mismatch, alignment, labels
  std::string file;
  std::string message;
};

// Checks files exist and load, dims agree within each space, ids align
// between spaces and across logits/tokens, and training labels are dense.
// Never throws for data problems; they are reported.
std::vector<PairIssue> ValidatePair(const PairConfig& config);
nlohmann::json IssuesToJson(const std::vector<PairIssue>& issues);

}  // namespace oodx
