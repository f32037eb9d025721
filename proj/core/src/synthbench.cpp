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

#include "oodx/synthbench.hpp"

#include <cmath>

#include "oodx/random.hpp"

namespace oodx {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Stream layout: fixed streams for global structure, then one stream per
// generated row, keyed by split.
constexpr std::uint64_t kStreamPreRotation = 100;
constexpr std::uint64_t kStreamFtRotation = 101;
constexpr std::uint64_t kStreamOffsetDirection = 102;

enum SplitCode : std::uint64_t { kTrainRows = 1, kValRows = 2, kIdTestRows = 3, kOodRows = 4 };

std::uint64_t RowStream(SplitCode split, std::size_t row) {
  return (static_cast<std::uint64_t>(split) << 32) | static_cast<std::uint64_t>(row);
}

// Random orthogonal matrix by modified Gram-Schmidt on Gaussian columns.
MatrixD RandomRotation(std::size_t d, CounterRng rng) {
  MatrixD q(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) q(i, j) = rng.Normal();
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < d; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) q(i, j) /= norm;
  }
  return q;
}

void Rotate(const MatrixD& rot, const std::vector<double>& x, std::span<float> out) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += rot(i, j) * x[j];
    out[i] = static_cast<float>(s);
  }
}

struct Generator {
  const SynthSpec& spec;
  std::size_t c;   // discriminative dims == classes
  std::size_t na;  // task-agnostic dims
  MatrixD pre_rot;
  MatrixD ft_rot;
  std::vector<double> offset_dir;

  explicit Generator(const SynthSpec& s)
      : spec(s),
        c(s.classes),
        na(s.dim - s.classes),
        pre_rot(RandomRotation(s.dim, CounterRng(s.seed, kStreamPreRotation))),
        ft_rot(RandomRotation(s.dim, CounterRng(s.seed, kStreamFtRotation))),
        offset_dir(na) {
    CounterRng rng(s.seed, kStreamOffsetDirection);
    double norm = 0.0;
    for (double& v : offset_dir) {
      v = rng.Normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : offset_dir) v /= norm;
  }

  // Latent mean in the discriminative subspace; class == C is held out.
  double Mean(int cls, std::size_t dim) const {
    if (static_cast<std::size_t>(cls) == c) return -spec.class_separation / 2.0;
    return dim == static_cast<std::size_t>(cls) ? spec.class_separation : 0.0;
  }

  struct Row {
    std::vector<double> pre;
    std::vector<double> ft;
    std::vector<double> logits;
    std::vector<double> logprobs;
  };

  Row Sample(SplitCode split, std::size_t index, int cls, bool shifted) const {
    CounterRng rng(spec.seed, RowStream(split, index));
    Row row;
    row.pre.resize(spec.dim);
    row.ft.resize(spec.dim);

    std::vector<double> disc_ft(c);
    for (std::size_t i = 0; i < c; ++i) {
      const double mu = Mean(cls, i);
      const double w = spec.within_class_std * rng.Normal();
      row.pre[i] = mu + w;
      disc_ft[i] = mu + spec.ft_tighten * w + spec.ft_noise * rng.Normal();
    }
    const double agn_scale = shifted ? spec.ood_scale : 1.0;
    for (std::size_t i = 0; i < na; ++i) {
      double a = spec.agnostic_std * agn_scale * rng.Normal();
      if (shifted) a += spec.ood_offset_sigmas * spec.agnostic_std * offset_dir[i];
      row.pre[c + i] = a;
      row.ft[c + i] = spec.ft_agnostic_shrink * a + spec.ft_noise * rng.Normal();
    }
    for (std::size_t i = 0; i < c; ++i) row.ft[i] = disc_ft[i];

    // Linear head matching the ft class-conditional Gaussians.
    const double var = spec.ft_tighten * spec.ft_tighten * spec.within_class_std *
                           spec.within_class_std +
                       spec.ft_noise * spec.ft_noise;
    row.logits.resize(c);
    for (std::size_t k = 0; k < c; ++k) {
      double dot = 0.0;
      double norm2 = 0.0;
      for (std::size_t i = 0; i < c; ++i) {
        const double m = Mean(static_cast<int>(k), i);
        dot += disc_ft[i] * m;
        norm2 += m * m;
      }
      row.logits[k] = (dot - norm2 / 2.0) / var;
    }

    // Language-model token log-probs: a shifted style is less likely under
    // the ID language model; an unseen topic only slightly so.
    double base = 1.5;
    if (split == kOodRows) base = shifted ? 2.5 : 1.7;
    const std::size_t tokens = 8 + static_cast<std::size_t>(rng.NextU64() % 17);
    row.logprobs.resize(tokens);
    for (double& lp : row.logprobs) lp = -std::abs(base + 0.5 * rng.Normal());
    return row;
  }
};

struct SplitBuffers {
  FeatureSet pre;
  FeatureSet ft;
  LogitSet logits;
  TokenLogProbSet tokens;
};

SplitBuffers MakeSplit(const Generator& gen, SplitCode code, std::size_t n,
                       std::string_view prefix, Split split, bool with_labels,
                       const std::vector<int>& classes, bool shifted) {
  const std::size_t d = gen.spec.dim;
  SplitBuffers b;
  b.pre.features = Matrix(n, d);
  b.ft.features = Matrix(n, d);
  b.logits.logits = Matrix(n, gen.c);
  const auto ids = SequentialIds(n, prefix);
  for (auto* set : {&b.pre, &b.ft}) {
    set->ids = ids;
    set->split = split;
    if (with_labels) set->labels = classes;
  }
  b.pre.feature_kind = FeatureKind::kLastCls;
  b.pre.model_name = "synth-pre";
  b.ft.feature_kind = FeatureKind::kFinetunedCls;
  b.ft.model_name = "synth-ft";
  b.logits.ids = ids;
  b.logits.split = split;
  b.logits.model_name = "synth-ft";
  b.tokens.ids = ids;

  for (std::size_t r = 0; r < n; ++r) {
    const auto row = gen.Sample(code, r, classes[r], shifted);
    Rotate(gen.pre_rot, row.pre, b.pre.features.row(r));
    Rotate(gen.ft_rot, row.ft, b.ft.features.row(r));
    for (std::size_t k = 0; k < gen.c; ++k) {
      b.logits.logits(r, k) = static_cast<float>(row.logits[k]);
    }
    b.tokens.logprobs.push_back(row.logprobs);
  }
  return b;
}

std::vector<int> Interleaved(std::size_t per_class, std::size_t classes) {
  std::vector<int> out(per_class * classes);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i % classes);
  return out;
}

}  // namespace

std::string_view OodModeName(OodMode mode) {
  return mode == OodMode::kShiftedManifold ? "shifted-manifold" : "held-out-class";
}

OodMode ParseOodMode(std::string_view name) {
  if (name == "shifted-manifold" || name == "nss") return OodMode::kShiftedManifold;
  if (name == "held-out-class" || name == "ss") return OodMode::kHeldOutClass;
  throw InvalidInput("unknown OOD mode '" + std::string(name) + "'");
}

void SynthSpec::Validate() const {
  if (classes < 2) throw InvalidInput("synthetic spec needs at least 2 classes");
  if (dim <= classes) {
    throw InvalidInput("synthetic spec needs dim > classes (task-agnostic dims)");
  }
  if (train_per_class < 1 || test_per_class < 1 || ood_count < 1) {
    throw InvalidInput("synthetic spec sample counts must be positive");
  }
  if (val_per_class * classes < 2) {
    throw InvalidInput("synthetic spec needs at least 2 validation samples");
  }
  for (double v : {class_separation, within_class_std, agnostic_std, ood_scale,
                   ft_tighten, ft_agnostic_shrink, ft_noise}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("synthetic spec scales must be positive and finite");
    }
  }
  if (!(ood_offset_sigmas >= 0.0) || !std::isfinite(ood_offset_sigmas)) {
    throw InvalidInput("synthetic spec OOD offset must be non-negative");
  }
}

json SynthSpec::ToJson() const {
  return {{"dim", dim},
          {"classes", classes},
          {"train_per_class", train_per_class},
          {"val_per_class", val_per_class},
          {"test_per_class", test_per_class},
          {"ood_count", ood_count},
          {"mode", OodModeName(mode)},
          {"seed", seed},
          {"class_separation", class_separation},
          {"within_class_std", within_class_std},
          {"agnostic_std", agnostic_std},
          {"ood_offset_sigmas", ood_offset_sigmas},
          {"ood_scale", ood_scale},
          {"ft_tighten", ft_tighten},
          {"ft_agnostic_shrink", ft_agnostic_shrink},
          {"ft_noise", ft_noise},
          {"generator", "splitmix64-counter/box-muller"}};
}

SynthSpec SynthSpec::FromJson(const json& j) {
  try {
    SynthSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.dim = j.value("dim", s.dim);
    s.classes = j.value("classes", s.classes);
    s.train_per_class = j.value("train_per_class", s.train_per_class);
    s.val_per_class = j.value("val_per_class", s.val_per_class);
    s.test_per_class = j.value("test_per_class", s.test_per_class);
    s.ood_count = j.value("ood_count", s.ood_count);
    s.mode = ParseOodMode(j.value("mode", std::string(OodModeName(s.mode))));
    s.class_separation = j.value("class_separation", s.class_separation);
    s.within_class_std = j.value("within_class_std", s.within_class_std);
    s.agnostic_std = j.value("agnostic_std", s.agnostic_std);
    s.ood_offset_sigmas = j.value("ood_offset_sigmas", s.ood_offset_sigmas);
    s.ood_scale = j.value("ood_scale", s.ood_scale);
    s.ft_tighten = j.value("ft_tighten", s.ft_tighten);
    s.ft_agnostic_shrink = j.value("ft_agnostic_shrink", s.ft_agnostic_shrink);
    s.ft_noise = j.value("ft_noise", s.ft_noise);
    s.Validate();
    return s;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed synthetic spec: ") + e.what());
  }
}

SynthPair GenerateSynth(const SynthSpec& spec) {
  spec.Validate();
  const Generator gen(spec);
  const std::size_t c = spec.classes;

  SynthPair out;
  out.spec = spec;
  auto assign = [](SplitBuffers&& b, FeatureSet& pre, FeatureSet& ft) {
    pre = std::move(b.pre);
    ft = std::move(b.ft);
  };

  assign(MakeSplit(gen, kTrainRows, spec.train_per_class * c, "train-", Split::kTrain,
                   true, Interleaved(spec.train_per_class, c), false),
         out.pre.train, out.ft.train);

  auto val = MakeSplit(gen, kValRows, spec.val_per_class * c, "val-", Split::kVal, true,
                       Interleaved(spec.val_per_class, c), false);
  out.logits_val = std::move(val.logits);
  assign(std::move(val), out.pre.val, out.ft.val);

  auto id_test = MakeSplit(gen, kIdTestRows, spec.test_per_class * c, "id-", Split::kTest,
                           true, Interleaved(spec.test_per_class, c), false);
  out.logits_id_test = std::move(id_test.logits);
  out.tokens_id_test = std::move(id_test.tokens);
  assign(std::move(id_test), out.pre.id_test, out.ft.id_test);

  const bool shifted = spec.mode == OodMode::kShiftedManifold;
  out.ood_latent_class = shifted ? Interleaved((spec.ood_count + c - 1) / c, c)
                                 : std::vector<int>(spec.ood_count, static_cast<int>(c));
  out.ood_latent_class.resize(spec.ood_count);
  auto ood = MakeSplit(gen, kOodRows, spec.ood_count, "ood-", Split::kTest, false,
                       out.ood_latent_class, shifted);
  out.logits_ood_test = std::move(ood.logits);
  out.tokens_ood_test = std::move(ood.tokens);
  assign(std::move(ood), out.pre.ood_test, out.ft.ood_test);
  return out;
}

PairConfig WriteSynth(const SynthPair& pair, const fs::path& out_dir,
                      const std::string& name) {
  fs::create_directories(out_dir / "pre");
  fs::create_directories(out_dir / "ft");
  fs::create_directories(out_dir / "logits");
  fs::create_directories(out_dir / "tokens");

  PairConfig config;
  config.name = name;
  config.shift_type =
      pair.spec.mode == OodMode::kShiftedManifold ? ShiftType::kNss : ShiftType::kSs;
  config.base_dir = out_dir;
  auto write_space = [&](const SynthSpace& space, const std::string& dir) {
    SpaceRefs refs{dir + "/train.oodx", dir + "/val.oodx", dir + "/id_test.oodx",
                   dir + "/ood_test.oodx"};
    WriteFeatureSet(out_dir / refs.train, space.train);
    WriteFeatureSet(out_dir / refs.val, space.val);
    WriteFeatureSet(out_dir / refs.id_test, space.id_test);
    WriteFeatureSet(out_dir / refs.ood_test, space.ood_test);
    return refs;
  };
  config.pre = write_space(pair.pre, "pre");
  config.ft = write_space(pair.ft, "ft");

  SplitRefs logits{"logits/val.oodx", "logits/id_test.oodx", "logits/ood_test.oodx"};
  WriteLogitSet(out_dir / logits.val, pair.logits_val);
  WriteLogitSet(out_dir / logits.id_test, pair.logits_id_test);
  WriteLogitSet(out_dir / logits.ood_test, pair.logits_ood_test);
  config.logits = logits;

  SplitRefs tokens{{}, "tokens/id_test.jsonl", "tokens/ood_test.jsonl"};
  WriteTokenLogProbs(out_dir / tokens.id_test, pair.tokens_id_test);
  WriteTokenLogProbs(out_dir / tokens.ood_test, pair.tokens_ood_test);
  config.tokens = tokens;

  WriteJson(out_dir / "spec.json", pair.spec.ToJson());
  WritePairConfig(out_dir / (name + ".pair.json"), config);
  return config;
}

}  // namespace oodx
