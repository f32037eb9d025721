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

// Synthetic two-space benchmark pairs.
//
// Each sample is drawn from latent factors: a class mean in a
// class-discriminative subspace, a within-class deviation there, and a
// task-agnostic component in the remaining dimensions. Both spaces are views
// of the same latent sample:
//
//   pre: [mu_y + w, a]                                      (randomly rotated)
//   ft : [mu_y + tighten * w + n1, agnostic_shrink * a + n2] (randomly rotated)
//
// with n1, n2 isotropic noise. The ft view keeps class structure and loses
// most task-agnostic detail, which is what separates the two OOD modes:
//
//   kShiftedManifold  same class means, agnostic component translated by
//                     `ood_offset_sigmas` and rescaled by `ood_scale`.
//   kHeldOutClass     an extra class mean that never appears in training.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "oodx/datastore.hpp"
#include "oodx/types.hpp"

namespace oodx {

enum class OodMode { kShiftedManifold, kHeldOutClass };

std::string_view OodModeName(OodMode mode);
OodMode ParseOodMode(std::string_view name);

struct SynthSpec {
  std::size_t dim = 16;
  std::size_t classes = 4;
  std::size_t train_per_class = 500;
  std::size_t val_per_class = 100;
  std::size_t test_per_class = 250;
  std::size_t ood_count = 1000;
  OodMode mode = OodMode::kShiftedManifold;
  std::uint64_t seed = 0;

  double class_separation = 3.0;
  double within_class_std = 1.5;
  double agnostic_std = 1.0;
  double ood_offset_sigmas = 10.0;
  double ood_scale = 1.5;
  double ft_tighten = 0.2;
  double ft_agnostic_shrink = 0.1;
  double ft_noise = 0.3;

  // Throws kInvalidInput.
  void Validate() const;
  nlohmann::json ToJson() const;
  // "seed" is required.
  static SynthSpec FromJson(const nlohmann::json& j);
};

struct SynthSpace {
  FeatureSet train;
  FeatureSet val;
  FeatureSet id_test;
  FeatureSet ood_test;
};

struct SynthPair {
  SynthSpec spec;
  SynthSpace pre;
  SynthSpace ft;
  LogitSet logits_val;
  LogitSet logits_id_test;
  LogitSet logits_ood_test;
  TokenLogProbSet tokens_id_test;
  TokenLogProbSet tokens_ood_test;
  // Class labels of the OOD samples' latent means (C for the held-out class).
  std::vector<int> ood_latent_class;
};

SynthPair GenerateSynth(const SynthSpec& spec);

// Writes every set plus `spec.json` and `<name>.pair.json` into `out_dir`
// and returns the pair config.
PairConfig WriteSynth(const SynthPair& pair, const std::filesystem::path& out_dir,
                      const std::string& name);

}  // namespace oodx
