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

// The oodx command-line tool. Each subcommand is a plain function over an
// options struct so that `pipeline` (and the tests) can compose them exactly
// as an operator would on the shell.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oodx/detectors.hpp"
#include "oodx/gaussian_model.hpp"
#include "oodx/metrics.hpp"
#include "oodx/synthbench.hpp"

namespace oodx::cli {

namespace fs = std::filesystem;

struct FitOptions {
  fs::path train;
  fs::path out;
  std::string detector = "md";  // md | knn | lof
  double shrinkage = kDefaultShrinkage;
  int k = kDefaultKnnK;
  int k_lof = kDefaultLofK;
  bool lof_normalize = false;
  int threads = 1;
};
void CmdFit(const FitOptions& o);

struct ScoreOptions {
  fs::path input;
  fs::path model;  // required for md, knn, lof
  fs::path out;
  std::string detector;  // md knn lof msp scaling energy d2u ppl
  std::string tag;       // overrides the detector tag stored in the output
  double temperature = kDefaultTemperature;
  bool energy_logsumexp = false;
  int threads = 1;
};
void CmdScore(const ScoreOptions& o);

struct CalibrateOptions {
  fs::path scores;
  fs::path out;
  std::string mode = "standardize";
  std::string split = "val";
};
// Returns false when the calibration is degenerate (still written, std 0).
bool CmdCalibrate(const CalibrateOptions& o);

struct FuseOptions {
  fs::path pre;
  fs::path ft;
  fs::path calib_pre;
  fs::path calib_ft;
  fs::path out;
  std::string aggregator = "mean";
  // Defaults to the mode recorded in the calibration files.
  std::optional<std::string> normalization;
};
void CmdFuse(const FuseOptions& o);

struct EvalOptions {
  fs::path id_scores;
  fs::path ood_scores;
  fs::path out;  // optional report.json
  std::string pair;
};
EvalReport CmdEval(const EvalOptions& o);

struct EnsembleOptions {
  std::vector<fs::path> inputs;
  fs::path out;
};
void CmdEnsemble(const EnsembleOptions& o);

struct ValidateOptions {
  fs::path pair;
};
std::vector<PairIssue> CmdValidate(const ValidateOptions& o);

struct PipelineOptions {
  fs::path pair;
  fs::path out;
  std::vector<std::string> detectors;  // empty: every detector the pair supports
  double shrinkage = kDefaultShrinkage;
  int k = kDefaultKnnK;
  int k_lof = kDefaultLofK;
  double temperature = kDefaultTemperature;
  std::string aggregator = "mean";
  std::string normalization = "standardize";
  int threads = 1;
};
// Returns one report per detector, in the order run.
std::vector<EvalReport> CmdPipeline(const PipelineOptions& o);

struct SynthOptions {
  SynthSpec spec;
  fs::path out;
  std::string name = "synth";
};
PairConfig CmdSynth(const SynthOptions& o);

// Entry point: parses argv (without the program name) and dispatches.
// Returns the process exit code.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oodx::cli
