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

#include "oodx/datastore.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace oodx {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'O', 'O', 'D', 'X'};
constexpr std::size_t kHeaderSize = 4 + 2 + 4;

Error Malformed(const std::string& msg) {
  return Error(ErrorKind::kMalformedContainer, msg);
}

template <typename U>
void PutLe(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

template <typename U>
U GetLe(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

std::string_view DTypeName(DType t) { return t == DType::kFloat32 ? "float32" : "float64"; }

DType ParseDType(const std::string& s) {
  if (s == "float32") return DType::kFloat32;
  if (s == "float64") return DType::kFloat64;
  throw Malformed("unknown block dtype '" + s + "'");
}

struct Header {
  json manifest;
  std::size_t manifest_length;
  std::size_t declared_payload;
};

// Parses the fixed header and manifest from `head`, which must hold at least
// the header and manifest bytes.
Header ParseHead(std::string_view head, std::size_t total_size) {
  if (total_size < kHeaderSize) throw Malformed("file too short for an oodx header");
  if (std::memcmp(head.data(), kMagic, 4) != 0) {
    throw Malformed("bad magic bytes; not an oodx container");
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(head.data());
  const auto version = GetLe<std::uint16_t>(p + 4);
  if (version != kContainerVersion) {
    throw Malformed("unsupported container version " + std::to_string(version));
  }
  const std::size_t mlen = GetLe<std::uint32_t>(p + 6);
  if (kHeaderSize + mlen > total_size || kHeaderSize + mlen > head.size()) {
    throw Malformed("manifest length exceeds file size");
  }
  Header h;
  h.manifest_length = mlen;
  try {
    h.manifest = json::parse(head.substr(kHeaderSize, mlen));
  } catch (const json::exception& e) {
    throw Malformed(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!h.manifest.is_object()) throw Malformed("manifest must be a JSON object");
  if (!h.manifest.contains("kind") || !h.manifest["kind"].is_string()) {
    throw Error(ErrorKind::kUnsupportedKind, "manifest has no kind");
  }
  const auto kind = h.manifest["kind"].get<std::string>();
  if (!IsKnownKind(kind)) {
    throw Error(ErrorKind::kUnsupportedKind, "unsupported container kind '" + kind + "'");
  }
  Container probe{h.manifest, {}};
  h.declared_payload = 0;
  for (const auto& b : probe.Blocks()) h.declared_payload += b.bytes();
  const std::size_t actual = total_size - kHeaderSize - mlen;
  if (actual != h.declared_payload) {
    throw Malformed("payload is " + std::to_string(actual) + " bytes but the manifest declares " +
                    std::to_string(h.declared_payload));
  }
  return h;
}

void CheckCrc(const json& manifest, std::span<const std::uint8_t> payload) {
  if (!manifest.contains("crc32") || !manifest["crc32"].is_number_unsigned()) {
    throw Malformed("manifest has no crc32");
  }
  const auto expected = manifest["crc32"].get<std::uint32_t>();
  const auto actual = Crc32(payload);
  if (expected != actual) {
    throw Error(ErrorKind::kCorruptFile, "payload checksum mismatch");
  }
}

std::vector<std::string> ReadIds(const json& m, std::size_t rows) {
  if (!m.contains("ids")) return SequentialIds(rows);
  std::vector<std::string> ids;
  for (const auto& v : m.at("ids")) {
    if (v.is_string()) {
      ids.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      ids.push_back(std::to_string(v.get<long long>()));
    } else {
      throw Malformed("ids must be strings or integers");
    }
  }
  return ids;
}

template <typename Fn>
auto WithPath(const fs::path& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.path().empty()) e.set_path(path.string());
    throw;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedContainer,
                std::string("unexpected manifest content: ") + e.what(), path.string());
  }
}

MatrixD ColumnD(const std::vector<double>& v) { return MatrixD(v.size(), 1, v); }

std::vector<double> ColumnValues(const MatrixD& m) {
  if (m.cols() != 1) throw Malformed("expected a single-column block");
  auto data = m.data();
  return {data.begin(), data.end()};
}

void RequireKind(const Container& c, std::string_view kind) {
  if (c.kind() != kind) {
    throw Error(ErrorKind::kUnsupportedKind,
                "expected a '" + std::string(kind) + "' container, got '" + c.kind() + "'");
  }
}

}  // namespace

bool IsKnownKind(std::string_view kind) {
  return kind == kinds::kFeatureSet || kind == kinds::kLogitSet ||
         kind == kinds::kScoreVector || kind == kinds::kGaussianModel ||
         kind == kinds::kKnnIndex || kind == kinds::kLofModel;
}

std::uint32_t Crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
    crc = crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// --- Container ---------------------------------------------------------------

std::string Container::kind() const { return manifest.value("kind", std::string()); }

std::vector<BlockInfo> Container::Blocks() const {
  std::vector<BlockInfo> out;
  if (!manifest.contains("blocks")) return out;
  const auto& blocks = manifest["blocks"];
  if (!blocks.is_array()) throw Malformed("manifest 'blocks' must be an array");
  std::size_t offset = 0;
  std::set<std::string> names;
  for (const auto& b : blocks) {
    BlockInfo info;
    if (!b.is_object() || !b.contains("name") || !b["name"].is_string() ||
        !b.contains("rows") || !b["rows"].is_number_unsigned() ||
        !b.contains("cols") || !b["cols"].is_number_unsigned()) {
      throw Malformed("each block needs a name and non-negative integer rows/cols");
    }
    info.name = b["name"].get<std::string>();
    info.rows = b["rows"].get<std::size_t>();
    info.cols = b["cols"].get<std::size_t>();
    if (info.cols != 0 && info.rows > (std::size_t{1} << 40) / info.cols) {
      throw Malformed("block '" + info.name + "' is implausibly large");
    }
    info.dtype = ParseDType(b.value("dtype", std::string("float32")));
    info.offset = offset;
    if (!names.insert(info.name).second) {
      throw Malformed("duplicate block name '" + info.name + "'");
    }
    offset += info.bytes();
    out.push_back(std::move(info));
  }
  return out;
}

bool Container::HasBlock(std::string_view name) const {
  for (const auto& b : Blocks()) {
    if (b.name == name) return true;
  }
  return false;
}

Matrix Container::FloatBlock(std::string_view name) const {
  for (const auto& b : Blocks()) {
    if (b.name != name) continue;
    if (b.dtype != DType::kFloat32) {
      throw Malformed("block '" + b.name + "' must be float32");
    }
    if (b.offset + b.bytes() > payload.size()) throw Malformed("block exceeds payload");
    std::vector<float> data(b.rows * b.cols);
    const std::uint8_t* p = payload.data() + b.offset;
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = std::bit_cast<float>(GetLe<std::uint32_t>(p + 4 * i));
    }
    return Matrix(b.rows, b.cols, std::move(data));
  }
  throw Malformed("container has no block '" + std::string(name) + "'");
}

MatrixD Container::DoubleBlock(std::string_view name) const {
  for (const auto& b : Blocks()) {
    if (b.name != name) continue;
    if (b.offset + b.bytes() > payload.size()) throw Malformed("block exceeds payload");
    std::vector<double> data(b.rows * b.cols);
    const std::uint8_t* p = payload.data() + b.offset;
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = b.dtype == DType::kFloat32
                    ? std::bit_cast<float>(GetLe<std::uint32_t>(p + 4 * i))
                    : std::bit_cast<double>(GetLe<std::uint64_t>(p + 8 * i));
    }
    return MatrixD(b.rows, b.cols, std::move(data));
  }
  throw Malformed("container has no block '" + std::string(name) + "'");
}

ContainerBuilder::ContainerBuilder(std::string_view kind, json manifest)
    : manifest_(std::move(manifest)) {
  if (!IsKnownKind(kind)) {
    throw Error(ErrorKind::kUnsupportedKind, "unsupported container kind '" +
                                                 std::string(kind) + "'");
  }
  if (manifest_.is_null()) manifest_ = json::object();
  manifest_["kind"] = kind;
}

ContainerBuilder& ContainerBuilder::Add(std::string name, const Matrix& m) {
  blocks_.push_back({{"name", std::move(name)}, {"rows", m.rows()}, {"cols", m.cols()},
                     {"dtype", DTypeName(DType::kFloat32)}});
  for (float v : m.data()) PutLe(payload_, std::bit_cast<std::uint32_t>(v));
  return *this;
}

ContainerBuilder& ContainerBuilder::Add(std::string name, const MatrixD& m) {
  blocks_.push_back({{"name", std::move(name)}, {"rows", m.rows()}, {"cols", m.cols()},
                     {"dtype", DTypeName(DType::kFloat64)}});
  for (double v : m.data()) PutLe(payload_, std::bit_cast<std::uint64_t>(v));
  return *this;
}

Container ContainerBuilder::Build() {
  manifest_["blocks"] = std::move(blocks_);
  manifest_["crc32"] = Crc32(payload_);
  return Container{std::move(manifest_), std::move(payload_)};
}

std::string EncodeContainer(const Container& container) {
  json manifest = container.manifest;
  if (!manifest.contains("kind") || !IsKnownKind(container.kind())) {
    throw Error(ErrorKind::kUnsupportedKind,
                "unsupported container kind '" + container.kind() + "'");
  }
  std::size_t declared = 0;
  for (const auto& b : container.Blocks()) declared += b.bytes();
  if (declared != container.payload.size()) {
    throw Malformed("payload size does not match the declared blocks");
  }
  manifest["crc32"] = Crc32(container.payload);
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> head;
  head.insert(head.end(), kMagic, kMagic + 4);
  PutLe<std::uint16_t>(head, kContainerVersion);
  PutLe<std::uint32_t>(head, static_cast<std::uint32_t>(text.size()));
  std::string out(head.begin(), head.end());
  out += text;
  out.append(reinterpret_cast<const char*>(container.payload.data()),
             container.payload.size());
  return out;
}

Container DecodeContainer(std::string_view bytes) {
  Header h = ParseHead(bytes, bytes.size());
  const std::size_t start = kHeaderSize + h.manifest_length;
  std::vector<std::uint8_t> payload(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                    bytes.end());
  CheckCrc(h.manifest, payload);
  return Container{std::move(h.manifest), std::move(payload)};
}

void WriteContainer(const fs::path& path, const Container& container) {
  WithPath(path, [&] {
    const std::string bytes = EncodeContainer(container);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIoError, "cannot open file for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIoError, "write failed");
    return 0;
  });
}

Container ReadContainer(const fs::path& path) {
  return WithPath(path, [&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIoError, "cannot open file for reading");
    std::error_code ec;
    const std::size_t total = fs::file_size(path, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot stat file");

    std::string head(std::min(total, kHeaderSize), '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    if (total >= kHeaderSize) {
      const auto* p = reinterpret_cast<const std::uint8_t*>(head.data());
      const std::size_t mlen = GetLe<std::uint32_t>(p + 6);
      if (std::memcmp(head.data(), kMagic, 4) == 0 && kHeaderSize + mlen <= total) {
        head.resize(kHeaderSize + mlen);
        in.read(head.data() + kHeaderSize, static_cast<std::streamsize>(mlen));
      }
    }
    // Validates the declared payload size against the file size before the
    // payload buffer is allocated.
    Header h = ParseHead(head, total);
    std::vector<std::uint8_t> payload(h.declared_payload);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    if (!in) throw Malformed("payload truncated while reading");
    CheckCrc(h.manifest, payload);
    return Container{std::move(h.manifest), std::move(payload)};
  });
}

// --- Feature sets ------------------------------------------------------------

Container ToContainer(const FeatureSet& set) {
  set.Validate();
  json m = {{"feature_kind", FeatureKindName(set.feature_kind)},
            {"model_name", set.model_name},
            {"split", SplitName(set.split)},
            {"ids", set.ids}};
  if (set.labels) m["labels"] = *set.labels;
  return ContainerBuilder(kinds::kFeatureSet, std::move(m))
      .Add("features", set.features)
      .Build();
}

FeatureSet FeatureSetFromContainer(const Container& c) {
  RequireKind(c, kinds::kFeatureSet);
  const auto& m = c.manifest;
  FeatureSet set;
  set.features = c.FloatBlock("features");
  set.ids = ReadIds(m, set.features.rows());
  if (m.contains("labels") && !m["labels"].is_null()) {
    set.labels = m["labels"].get<std::vector<int>>();
  }
  set.feature_kind = ParseFeatureKind(m.value("feature_kind", std::string("other")));
  set.model_name = m.value("model_name", std::string());
  set.split = ParseSplit(m.value("split", std::string("train")));
  set.Validate();
  return set;
}

void WriteFeatureSet(const fs::path& path, const FeatureSet& set) {
  WithPath(path, [&] {
    WriteContainer(path, ToContainer(set));
    return 0;
  });
}

FeatureSet ReadFeatureSet(const fs::path& path) {
  return WithPath(path, [&] { return FeatureSetFromContainer(ReadContainer(path)); });
}

// --- Logits ------------------------------------------------------------------

void WriteLogitSet(const fs::path& path, const LogitSet& set) {
  WithPath(path, [&] {
    set.Validate();
    json m = {{"model_name", set.model_name},
              {"split", SplitName(set.split)},
              {"ids", set.ids}};
    WriteContainer(path, ContainerBuilder(kinds::kLogitSet, std::move(m))
                             .Add("logits", set.logits)
                             .Build());
    return 0;
  });
}

LogitSet ReadLogitSet(const fs::path& path) {
  return WithPath(path, [&] {
    const Container c = ReadContainer(path);
    RequireKind(c, kinds::kLogitSet);
    LogitSet set;
    set.logits = c.FloatBlock("logits");
    set.ids = ReadIds(c.manifest, set.logits.rows());
    set.model_name = c.manifest.value("model_name", std::string());
    set.split = ParseSplit(c.manifest.value("split", std::string("test")));
    set.Validate();
    return set;
  });
}

// --- Scores ------------------------------------------------------------------

void WriteScoreVector(const fs::path& path, const ScoreVector& scores) {
  WithPath(path, [&] {
    scores.Validate();
    json m = {{"detector", scores.detector},
              {"ids", scores.ids},
              {"calibration", CalibrationName(scores.calibration)}};
    if (!scores.components.empty()) m["components"] = scores.components;
    if (!scores.aggregator.empty()) m["aggregator"] = scores.aggregator;
    if (!scores.flagged_rows.empty()) m["flagged_rows"] = scores.flagged_rows;
    ContainerBuilder b(kinds::kScoreVector, std::move(m));
    b.Add("scores", ColumnD(scores.scores));
    if (scores.distances) b.Add("distances", ColumnD(*scores.distances));
    WriteContainer(path, b.Build());
    return 0;
  });
}

ScoreVector ReadScoreVector(const fs::path& path) {
  return WithPath(path, [&] {
    const Container c = ReadContainer(path);
    RequireKind(c, kinds::kScoreVector);
    const auto& m = c.manifest;
    ScoreVector s;
    s.detector = m.value("detector", std::string());
    s.scores = ColumnValues(c.DoubleBlock("scores"));
    if (c.HasBlock("distances")) s.distances = ColumnValues(c.DoubleBlock("distances"));
    s.ids = ReadIds(m, s.scores.size());
    s.calibration = ParseCalibration(m.value("calibration", std::string("raw")));
    s.components = m.value("components", std::vector<std::string>());
    s.aggregator = m.value("aggregator", std::string());
    s.flagged_rows = m.value("flagged_rows", std::vector<std::size_t>());
    s.Validate();
    return s;
  });
}

// --- Fitted models -----------------------------------------------------------

void WriteGaussianModel(const fs::path& path, const GaussianModel& model) {
  WithPath(path, [&] {
    json m = {{"shrinkage_epsilon", model.shrinkage_epsilon()},
              {"feature_kind", FeatureKindName(model.feature_kind())},
              {"num_classes", model.num_classes()},
              {"dim", model.dim()},
              {"fit_sample_count", model.fit_sample_count()}};
    WriteContainer(path, ContainerBuilder(kinds::kGaussianModel, std::move(m))
                             .Add("centroids", model.centroids())
                             .Add("cholesky", model.factor().lower())
                             .Build());
    return 0;
  });
}

GaussianModel ReadGaussianModel(const fs::path& path) {
  return WithPath(path, [&] {
    const Container c = ReadContainer(path);
    RequireKind(c, kinds::kGaussianModel);
    const auto& m = c.manifest;
    return GaussianModel::FromParts(
        c.FloatBlock("centroids"), c.DoubleBlock("cholesky"),
        m.at("shrinkage_epsilon").get<double>(),
        ParseFeatureKind(m.value("feature_kind", std::string("other"))),
        m.value("fit_sample_count", std::size_t{0}));
  });
}

void WriteKnnIndex(const fs::path& path, const KnnIndex& index) {
  WithPath(path, [&] {
    WriteContainer(path, ContainerBuilder(kinds::kKnnIndex, {{"k", index.k()}})
                             .Add("rows", index.rows())
                             .Build());
    return 0;
  });
}

KnnIndex ReadKnnIndex(const fs::path& path) {
  return WithPath(path, [&] {
    const Container c = ReadContainer(path);
    RequireKind(c, kinds::kKnnIndex);
    return KnnIndex::FromNormalized(c.FloatBlock("rows"), c.manifest.at("k").get<int>());
  });
}

void WriteLofModel(const fs::path& path, const LofModel& model) {
  WithPath(path, [&] {
    json m = {{"k", model.k()},
              {"normalize", model.normalize()},
              {"zero_distance_epsilon", kLofZeroDistanceEpsilon}};
    WriteContainer(path, ContainerBuilder(kinds::kLofModel, std::move(m))
                             .Add("train", model.train())
                             .Add("k_distances", ColumnD(model.k_distances()))
                             .Add("lrd", ColumnD(model.lrd()))
                             .Build());
    return 0;
  });
}

LofModel ReadLofModel(const fs::path& path) {
  return WithPath(path, [&] {
    const Container c = ReadContainer(path);
    RequireKind(c, kinds::kLofModel);
    return LofModel::FromParts(c.FloatBlock("train"), c.manifest.at("k").get<int>(),
                               c.manifest.value("normalize", false),
                               ColumnValues(c.DoubleBlock("k_distances")),
                               ColumnValues(c.DoubleBlock("lrd")));
  });
}

// --- JSON and JSON Lines -----------------------------------------------------

void WriteTokenLogProbs(const fs::path& path, const TokenLogProbSet& set) {
  WithPath(path, [&] {
    set.Validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIoError, "cannot open file for writing");
    for (std::size_t i = 0; i < set.size(); ++i) {
      out << json{{"id", set.ids[i]}, {"logprobs", set.logprobs[i]}}.dump() << '\n';
    }
    if (!out) throw Error(ErrorKind::kIoError, "write failed");
    return 0;
  });
}

TokenLogProbSet ReadTokenLogProbs(const fs::path& path) {
  return WithPath(path, [&] {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIoError, "cannot open file for reading");
    TokenLogProbSet set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const json j = json::parse(line);
        const auto& id = j.at("id");
        set.ids.push_back(id.is_string() ? id.get<std::string>()
                                         : std::to_string(id.get<long long>()));
        set.logprobs.push_back(j.at("logprobs").get<std::vector<double>>());
      } catch (const json::exception& e) {
        throw InvalidInput("line " + std::to_string(line_no) +
                           ": malformed token log-prob record: " + e.what());
      }
    }
    set.Validate();
    return set;
  });
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot open file for writing", path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIoError, "write failed", path.string());
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open file for reading", path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("invalid JSON: ") + e.what(),
                path.string());
  }
}

// --- Pair configs ------------------------------------------------------------

std::string_view ShiftTypeName(ShiftType t) {
  switch (t) {
    case ShiftType::kNss: return "NSS";
    case ShiftType::kSs: return "SS";
    case ShiftType::kCrossTask: return "cross-task";
    case ShiftType::kUnknown: return "unknown";
  }
  return "unknown";
}

ShiftType ParseShiftType(std::string_view name) {
  for (auto t : {ShiftType::kNss, ShiftType::kSs, ShiftType::kCrossTask,
                 ShiftType::kUnknown}) {
    if (ShiftTypeName(t) == name) return t;
  }
  throw InvalidInput("unknown shift type '" + std::string(name) + "'");
}

fs::path PairConfig::Resolve(const fs::path& p) const {
  if (p.empty() || p.is_absolute()) return p;
  return base_dir / p;
}

namespace {

json SpaceToJson(const SpaceRefs& s) {
  return {{"train", s.train.generic_string()},
          {"val", s.val.generic_string()},
          {"id_test", s.id_test.generic_string()},
          {"ood_test", s.ood_test.generic_string()}};
}

SpaceRefs SpaceFromJson(const json& j) {
  SpaceRefs s;
  s.train = j.at("train").get<std::string>();
  s.val = j.at("val").get<std::string>();
  s.id_test = j.at("id_test").get<std::string>();
  s.ood_test = j.at("ood_test").get<std::string>();
  return s;
}

json SplitToJson(const SplitRefs& s) {
  json j = {{"id_test", s.id_test.generic_string()},
            {"ood_test", s.ood_test.generic_string()}};
  if (!s.val.empty()) j["val"] = s.val.generic_string();
  return j;
}

SplitRefs SplitFromJson(const json& j) {
  SplitRefs s;
  s.val = j.value("val", std::string());
  s.id_test = j.at("id_test").get<std::string>();
  s.ood_test = j.at("ood_test").get<std::string>();
  return s;
}

}  // namespace

json PairConfig::ToJson() const {
  json j = {{"name", name},
            {"shift_type", ShiftTypeName(shift_type)},
            {"pre", SpaceToJson(pre)},
            {"ft", SpaceToJson(ft)}};
  if (logits) j["logits"] = SplitToJson(*logits);
  if (tokens) j["tokens"] = SplitToJson(*tokens);
  return j;
}

PairConfig PairConfig::FromJson(const json& j, fs::path base_dir) {
  try {
    PairConfig c;
    c.name = j.at("name").get<std::string>();
    c.shift_type = ParseShiftType(j.value("shift_type", std::string("unknown")));
    c.pre = SpaceFromJson(j.at("pre"));
    c.ft = SpaceFromJson(j.at("ft"));
    if (j.contains("logits")) c.logits = SplitFromJson(j["logits"]);
    if (j.contains("tokens")) c.tokens = SplitFromJson(j["tokens"]);
    c.base_dir = std::move(base_dir);
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed pair config: ") + e.what());
  }
}

PairConfig ReadPairConfig(const fs::path& path) {
  const json j = ReadJson(path);
  try {
    return PairConfig::FromJson(j, path.parent_path());
  } catch (Error& e) {
    e.set_path(path.string());
    throw;
  }
}

void WritePairConfig(const fs::path& path, const PairConfig& config) {
  WriteJson(path, config.ToJson());
}

std::vector<PairIssue> ValidatePair(const PairConfig& config) {
  std::vector<PairIssue> issues;
  auto report = [&](std::string code, const fs::path& file, std::string msg) {
    issues.push_back({std::move(code), file.generic_string(), std::move(msg)});
  };

  // Loads a file, recording missing/unreadable issues.
  auto load = [&](const fs::path& rel, auto&& reader) -> std::optional<decltype(reader(rel))> {
    const fs::path p = config.Resolve(rel);
    if (!fs::exists(p)) {
      report("missing-file", rel, "file does not exist");
      return std::nullopt;
    }
    try {
      return reader(p);
    } catch (const Error& e) {
      report("unreadable", rel, std::string(e.name()) + ": " + e.what());
      return std::nullopt;
    }
  };

  struct LoadedSpace {
    std::map<std::string, std::optional<FeatureSet>> sets;
  };
  auto load_space = [&](const SpaceRefs& refs, std::string_view space) {
    LoadedSpace out;
    const std::pair<std::string, fs::path> files[] = {
        {"train", refs.train}, {"val", refs.val},
        {"id_test", refs.id_test}, {"ood_test", refs.ood_test}};
    std::optional<std::size_t> dim;
    fs::path dim_file;
    for (const auto& [split, rel] : files) {
      auto set = load(rel, [](const fs::path& p) { return ReadFeatureSet(p); });
      if (set) {
        if (!dim) {
          dim = set->dim();
          dim_file = rel;
        } else if (set->dim() != *dim) {
          report("dim-mismatch", rel,
                 std::string(space) + " space: dimension " + std::to_string(set->dim()) +
                     " differs from " + std::to_string(*dim) + " in " +
                     dim_file.generic_string());
        }
      }
      out.sets[split] = std::move(set);
    }
    const auto& train = out.sets["train"];
    if (train) {
      if (!train->labels) {
        report("labels", refs.train, std::string(space) + " training set has no labels");
      } else {
        const int c = train->NumClasses();
        std::vector<bool> seen(static_cast<std::size_t>(c), false);
        for (int l : *train->labels) seen[static_cast<std::size_t>(l)] = true;
        for (int k = 0; k < c; ++k) {
          if (!seen[static_cast<std::size_t>(k)]) {
            report("labels", refs.train,
                   std::string(space) + " training labels are not dense: class " +
                       std::to_string(k) + " has no samples");
          }
        }
      }
    }
    return out;
  };

  LoadedSpace pre = load_space(config.pre, "pre");
  LoadedSpace ft = load_space(config.ft, "ft");

  auto check_ids = [&](const std::vector<std::string>& a, const std::vector<std::string>& b,
                       const fs::path& file, const std::string& what) {
    if (a == b) return;
    std::set<std::string> sa(a.begin(), a.end());
    std::set<std::string> sb(b.begin(), b.end());
    std::string detail;
    for (const auto& id : sb) {
      if (!sa.count(id)) {
        detail = "id '" + id + "' is missing";
        break;
      }
    }
    if (detail.empty()) {
      for (const auto& id : sa) {
        if (!sb.count(id)) {
          detail = "unexpected id '" + id + "'";
          break;
        }
      }
    }
    if (detail.empty()) detail = "ids are in a different order";
    report("alignment", file, what + ": " + detail);
  };

  const std::pair<std::string, fs::path> pre_files[] = {
      {"train", config.pre.train}, {"val", config.pre.val},
      {"id_test", config.pre.id_test}, {"ood_test", config.pre.ood_test}};
  for (const auto& [split, rel] : pre_files) {
    const auto& a = pre.sets[split];
    const auto& b = ft.sets[split];
    if (!a || !b) continue;
    check_ids(a->ids, b->ids, rel, "pre " + split + " vs ft " + split);
    if (split == "train" && a->labels && b->labels && *a->labels != *b->labels) {
      report("alignment", rel, "pre and ft training labels differ");
    }
  }

  const int num_classes = ft.sets["train"] ? ft.sets["train"]->NumClasses() : 0;
  if (config.logits) {
    const std::pair<std::string, fs::path> files[] = {{"val", config.logits->val},
                                                      {"id_test", config.logits->id_test},
                                                      {"ood_test", config.logits->ood_test}};
    for (const auto& [split, rel] : files) {
      if (rel.empty()) continue;
      auto set = load(rel, [](const fs::path& p) { return ReadLogitSet(p); });
      if (!set) continue;
      if (ft.sets[split]) check_ids(set->ids, ft.sets[split]->ids, rel, "logits " + split);
      if (num_classes > 0 && set->num_classes() != static_cast<std::size_t>(num_classes)) {
        report("dim-mismatch", rel,
               "logits have " + std::to_string(set->num_classes()) +
                   " classes but training labels imply " + std::to_string(num_classes));
      }
    }
  }
  if (config.tokens) {
    const std::pair<std::string, fs::path> files[] = {{"val", config.tokens->val},
                                                      {"id_test", config.tokens->id_test},
                                                      {"ood_test", config.tokens->ood_test}};
    for (const auto& [split, rel] : files) {
      if (rel.empty()) continue;
      auto set = load(rel, [](const fs::path& p) { return ReadTokenLogProbs(p); });
      if (set && ft.sets[split]) {
        check_ids(set->ids, ft.sets[split]->ids, rel, "tokens " + split);
      }
    }
  }
  return issues;
}

json IssuesToJson(const std::vector<PairIssue>& issues) {
  json arr = json::array();
  for (const auto& i : issues) {
    arr.push_back({{"code", i.code}, {"file", i.file}, {"message", i.message}});
  }
  return arr;
}

}  // namespace oodx
