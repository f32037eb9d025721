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

#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "oodx/datastore.hpp"
#include "oodx/fusion.hpp"
#include "oodx/parallel.hpp"

namespace oodx::cli {

using json = nlohmann::json;

namespace {

const std::set<std::string>& FeatureDetectors() {
  static const std::set<std::string> s = {"md", "knn", "lof"};
  return s;
}

const std::set<std::string>& LogitDetectors() {
  static const std::set<std::string> s = {"msp", "scaling", "energy", "d2u"};
  return s;
}

void EnsureParent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

void CmdFit(const FitOptions& o) {
  const FeatureSet train = ReadFeatureSet(o.train);
  EnsureParent(o.out);
  try {
    if (o.detector == "md") {
      WriteGaussianModel(o.out, GaussianModel::Fit(train, o.shrinkage));
    } else if (o.detector == "knn") {
      WriteKnnIndex(o.out, KnnIndex::Fit(train, o.k));
    } else if (o.detector == "lof") {
      WriteLofModel(o.out, LofModel::Fit(train, {o.k_lof, o.lof_normalize, o.threads}));
    } else {
      throw InvalidInput("fit supports detectors md, knn and lof, not '" + o.detector + "'");
    }
  } catch (Error& e) {
    if (e.path().empty()) e.set_path(o.train.string());
    throw;
  }
}

void CmdScore(const ScoreOptions& o) {
  ScoreVector scores;
  const bool needs_model = FeatureDetectors().count(o.detector) > 0;
  if (needs_model && o.model.empty()) {
    throw InvalidInput("detector '" + o.detector + "' needs --model");
  }
  try {
    if (o.detector == "md") {
      const auto model = ReadGaussianModel(o.model);
      scores = model.ScoreBatch(ReadFeatureSet(o.input), o.threads);
    } else if (o.detector == "knn") {
      const auto index = ReadKnnIndex(o.model);
      scores = index.ScoreBatch(ReadFeatureSet(o.input), o.threads);
    } else if (o.detector == "lof") {
      const auto model = ReadLofModel(o.model);
      scores = model.ScoreBatch(ReadFeatureSet(o.input), o.threads);
    } else if (LogitDetectors().count(o.detector)) {
      const LogitSet logits = ReadLogitSet(o.input);
      if (o.detector == "msp") scores = Msp(logits);
      if (o.detector == "scaling") scores = ScaledMsp(logits, o.temperature);
      if (o.detector == "energy") scores = Energy(logits, {o.energy_logsumexp});
      if (o.detector == "d2u") scores = D2u(logits);
    } else if (o.detector == "ppl") {
      scores = PplScore(ReadTokenLogProbs(o.input));
    } else {
      throw InvalidInput("unknown detector '" + o.detector + "'");
    }
  } catch (Error& e) {
    if (e.path().empty()) e.set_path(o.input.string());
    throw;
  }
  if (!o.tag.empty()) scores.detector = o.tag;
  EnsureParent(o.out);
  WriteScoreVector(o.out, scores);
}

bool CmdCalibrate(const CalibrateOptions& o) {
  const ScoreVector scores = ReadScoreVector(o.scores);
  const auto mode = ParseNormalizationMode(o.mode);
  if (mode == NormalizationMode::kNone) {
    throw InvalidInput("calibration mode must be standardize or minmax");
  }
  CalibrationStats stats;
  bool ok = true;
  try {
    stats = Calibrate(scores, mode);
  } catch (const DegenerateCalibration& e) {
    stats = e.stats();
    ok = false;
  } catch (Error& e) {
    if (e.path().empty()) e.set_path(o.scores.string());
    throw;
  }
  stats.split = o.split;
  EnsureParent(o.out);
  WriteJson(o.out, stats.ToJson());
  return ok;
}

void CmdFuse(const FuseOptions& o) {
  const ScoreVector pre = ReadScoreVector(o.pre);
  const ScoreVector ft = ReadScoreVector(o.ft);
  const auto stats_pre = CalibrationStats::FromJson(ReadJson(o.calib_pre));
  const auto stats_ft = CalibrationStats::FromJson(ReadJson(o.calib_ft));

  FusionOptions options;
  options.aggregator = Aggregator::Parse(o.aggregator);
  if (o.normalization) {
    options.normalization = ParseNormalizationMode(*o.normalization);
  } else {
    if (stats_pre.mode != stats_ft.mode) {
      throw InvalidInput("calibration files use different modes; pass --norm");
    }
    options.normalization = stats_pre.mode;
  }
  ScoreVector fused;
  try {
    fused = Gnome(pre, ft, stats_pre, stats_ft, options);
  } catch (Error& e) {
    if (e.path().empty()) e.set_path(o.ft.string());
    throw;
  }
  EnsureParent(o.out);
  WriteScoreVector(o.out, fused);
}

EvalReport CmdEval(const EvalOptions& o) {
  const ScoreVector id = ReadScoreVector(o.id_scores);
  const ScoreVector ood = ReadScoreVector(o.ood_scores);
  EvalReport report = Evaluate(id, ood, o.pair);
  if (!o.out.empty()) {
    EnsureParent(o.out);
    WriteJson(o.out, report.ToJson());
  }
  return report;
}

void CmdEnsemble(const EnsembleOptions& o) {
  std::vector<ScoreVector> inputs;
  for (const auto& p : o.inputs) inputs.push_back(ReadScoreVector(p));
  EnsureParent(o.out);
  WriteScoreVector(o.out, EnsembleSum(inputs));
}

std::vector<PairIssue> CmdValidate(const ValidateOptions& o) {
  return ValidatePair(ReadPairConfig(o.pair));
}

PairConfig CmdSynth(const SynthOptions& o) {
  fs::create_directories(o.out);
  return WriteSynth(GenerateSynth(o.spec), o.out, o.name);
}

std::vector<EvalReport> CmdPipeline(const PipelineOptions& o) {
  const PairConfig pair = ReadPairConfig(o.pair);
  std::vector<std::string> detectors = o.detectors;
  if (detectors.empty()) {
    detectors = {"md_pre", "md_ft", "gnome", "knn_pre", "knn_ft", "lof"};
    if (pair.logits) {
      for (const char* d : {"msp", "scaling", "energy", "d2u"}) detectors.push_back(d);
    }
    if (pair.tokens) detectors.push_back("ppl");
  }
  static const std::set<std::string> known = {
      "md_pre", "md_ft", "gnome", "knn_pre", "knn_ft", "lof",
      "msp", "scaling", "energy", "d2u", "ppl"};
  for (const auto& d : detectors) {
    if (!known.count(d)) throw InvalidInput("unknown pipeline detector '" + d + "'");
  }

  const fs::path models = o.out / "models";
  const fs::path scores = o.out / "scores";
  const fs::path calib = o.out / "calib";
  const fs::path reports = o.out / "reports";
  for (const auto& dir : {models, scores, calib, reports}) fs::create_directories(dir);

  auto score_path = [&](const std::string& det, const std::string& split) {
    return scores / det / (split + ".oodx");
  };
  std::set<std::string> done;
  std::vector<EvalReport> out;

  auto evaluate = [&](const std::string& det) {
    EvalOptions e;
    e.id_scores = score_path(det, "id_test");
    e.ood_scores = score_path(det, "ood_test");
    e.out = reports / (det + ".json");
    e.pair = pair.name;
    out.push_back(CmdEval(e));
  };

  // Fits a feature detector on one space and scores the requested splits.
  auto run_feature = [&](const std::string& det, const std::string& kind,
                         const SpaceRefs& space, bool with_val) {
    if (done.count(det)) return;
    FitOptions fit;
    fit.train = pair.Resolve(space.train);
    fit.out = models / (det + ".oodx");
    fit.detector = kind;
    fit.shrinkage = o.shrinkage;
    fit.k = o.k;
    fit.k_lof = o.k_lof;
    fit.threads = o.threads;
    CmdFit(fit);
    std::vector<std::pair<std::string, fs::path>> splits = {
        {"id_test", space.id_test}, {"ood_test", space.ood_test}};
    if (with_val) splits.insert(splits.begin(), {"val", space.val});
    for (const auto& [split, rel] : splits) {
      ScoreOptions s;
      s.input = pair.Resolve(rel);
      s.model = fit.out;
      s.out = score_path(det, split);
      s.detector = kind;
      s.tag = det;
      s.threads = o.threads;
      CmdScore(s);
    }
    done.insert(det);
  };

  for (const auto& det : detectors) {
    if (det == "md_pre" || det == "md_ft" || det == "gnome") {
      run_feature("md_pre", "md", pair.pre, true);
      run_feature("md_ft", "md", pair.ft, true);
      if (det != "gnome") {
        evaluate(det);
        continue;
      }
      for (const std::string space : {"md_pre", "md_ft"}) {
        CalibrateOptions c;
        c.scores = score_path(space, "val");
        c.out = calib / (space + ".json");
        c.mode = o.normalization == "none" ? "standardize" : o.normalization;
        CmdCalibrate(c);
      }
      for (const std::string split : {"id_test", "ood_test"}) {
        FuseOptions f;
        f.pre = score_path("md_pre", split);
        f.ft = score_path("md_ft", split);
        f.calib_pre = calib / "md_pre.json";
        f.calib_ft = calib / "md_ft.json";
        f.out = score_path("gnome", split);
        f.aggregator = o.aggregator;
        f.normalization = o.normalization;
        CmdFuse(f);
      }
      evaluate("gnome");
    } else if (det == "knn_pre" || det == "knn_ft") {
      run_feature(det, "knn", det == "knn_pre" ? pair.pre : pair.ft, false);
      evaluate(det);
    } else if (det == "lof") {
      run_feature(det, "lof", pair.ft, false);
      evaluate(det);
    } else if (det == "ppl") {
      if (!pair.tokens) throw InvalidInput("pair config has no token log-prob files");
      for (const auto& [split, rel] : {std::pair<std::string, fs::path>{"id_test", pair.tokens->id_test},
                                       {"ood_test", pair.tokens->ood_test}}) {
        ScoreOptions s;
        s.input = pair.Resolve(rel);
        s.out = score_path(det, split);
        s.detector = det;
        CmdScore(s);
      }
      evaluate(det);
    } else {
      if (!pair.logits) throw InvalidInput("pair config has no logit files");
      for (const auto& [split, rel] : {std::pair<std::string, fs::path>{"id_test", pair.logits->id_test},
                                       {"ood_test", pair.logits->ood_test}}) {
        ScoreOptions s;
        s.input = pair.Resolve(rel);
        s.out = score_path(det, split);
        s.detector = det;
        s.temperature = o.temperature;
        CmdScore(s);
      }
      evaluate(det);
    }
  }

  std::ofstream summary(o.out / "summary.txt", std::ios::trunc);
  for (const auto& r : out) summary << r.TableRow() << '\n';
  return out;
}

namespace {

void PrintError(std::ostream& err, bool as_json, std::string_view name,
                const std::string& message, const std::string& path) {
  if (as_json) {
    json j = {{"error", name}, {"message", message}};
    if (!path.empty()) j["path"] = path;
    err << j.dump() << '\n';
  } else {
    err << "oodx: " << name << ": " << message;
    if (!path.empty()) err << " [" << path << "]";
    err << '\n';
  }
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"oodx: out-of-distribution scoring and evaluation on exported embeddings"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  int threads = DefaultThreadCount();
  bool json_errors = false;
  app.add_option("--threads", threads, "Worker threads (fallback: OODX_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", json_errors, "Print errors as JSON on stderr");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a detector on ID training features");
  fit_cmd->add_option("train", fit.train, "Training feature set (.oodx)")->required();
  fit_cmd->add_option("-o,--out", fit.out, "Output model (.oodx)")->required();
  fit_cmd->add_option("--detector", fit.detector, "md, knn or lof")
      ->check(CLI::IsMember({"md", "knn", "lof"}));
  fit_cmd->add_option("--shrinkage", fit.shrinkage, "Covariance ridge epsilon (md)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--k", fit.k, "Neighbours (knn)");
  fit_cmd->add_option("--k-lof", fit.k_lof, "Neighbours (lof)");
  fit_cmd->add_flag("--lof-normalize", fit.lof_normalize, "L2-normalize features for lof");

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score samples with one detector");
  score_cmd->add_option("input", score.input, "Features, logits or token log-probs")
      ->required();
  score_cmd->add_option("-o,--out", score.out, "Output scores (.oodx)")->required();
  score_cmd->add_option("--detector", score.detector)
      ->required()
      ->check(CLI::IsMember({"md", "knn", "lof", "msp", "scaling", "energy", "d2u", "ppl"}));
  score_cmd->add_option("--model", score.model, "Fitted model/index (md, knn, lof)");
  score_cmd->add_option("--tag", score.tag, "Detector tag stored in the output");
  score_cmd->add_option("--temperature", score.temperature, "Softmax temperature (scaling)")
      ->check(CLI::PositiveNumber);
  score_cmd->add_flag("--energy-logsumexp", score.energy_logsumexp,
                      "Energy as -logsumexp(f) instead of -sum(exp f)");

  CalibrateOptions calibrate;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Estimate normalization stats on ID validation scores");
  calibrate_cmd->add_option("scores", calibrate.scores)->required();
  calibrate_cmd->add_option("-o,--out", calibrate.out, "Output stats (.json)")->required();
  calibrate_cmd->add_option("--mode", calibrate.mode)
      ->check(CLI::IsMember({"standardize", "minmax"}));
  calibrate_cmd->add_option("--split", calibrate.split, "Split tag recorded in the stats");

  FuseOptions fuse;
  std::string fuse_norm;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse two calibrated distance scores");
  fuse_cmd->add_option("pre", fuse.pre)->required();
  fuse_cmd->add_option("ft", fuse.ft)->required();
  fuse_cmd->add_option("calib_pre", fuse.calib_pre)->required();
  fuse_cmd->add_option("calib_ft", fuse.calib_ft)->required();
  fuse_cmd->add_option("-o,--out", fuse.out)->required();
  fuse_cmd->add_option("--agg", fuse.aggregator, "mean, max or weighted:w1,w2");
  fuse_cmd->add_option("--norm", fuse_norm, "standardize, minmax or none")
      ->check(CLI::IsMember({"standardize", "minmax", "none"}));

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "AUROC and FAR95 for ID vs OOD scores");
  eval_cmd->add_option("id_scores", eval.id_scores)->required();
  eval_cmd->add_option("ood_scores", eval.ood_scores)->required();
  eval_cmd->add_option("-o,--out", eval.out, "Report (.json)");
  eval_cmd->add_option("--pair", eval.pair, "Pair name for the table row");

  EnsembleOptions ensemble;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Sum aligned scores across seeds");
  ensemble_cmd->add_option("inputs", ensemble.inputs)->required()->expected(2, -1);
  ensemble_cmd->add_option("-o,--out", ensemble.out)->required();

  PipelineOptions pipeline;
  std::string pipeline_detectors;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Fit, score, fuse and evaluate a pair");
  pipeline_cmd->add_option("pair", pipeline.pair, "Pair config (.pair.json)")->required();
  pipeline_cmd->add_option("-o,--out", pipeline.out, "Output directory")->required();
  pipeline_cmd->add_option("--detectors", pipeline_detectors, "Comma-separated list");
  pipeline_cmd->add_option("--shrinkage", pipeline.shrinkage)->check(CLI::NonNegativeNumber);
  pipeline_cmd->add_option("--k", pipeline.k);
  pipeline_cmd->add_option("--k-lof", pipeline.k_lof);
  pipeline_cmd->add_option("--temperature", pipeline.temperature)->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--agg", pipeline.aggregator);
  pipeline_cmd->add_option("--norm", pipeline.normalization)
      ->check(CLI::IsMember({"standardize", "minmax", "none"}));

  SynthOptions synth;
  std::string synth_mode = "shifted-manifold";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic benchmark pair");
  synth_cmd->add_option("-o,--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.spec.seed)->required();
  synth_cmd->add_option("--mode", synth_mode)
      ->check(CLI::IsMember({"shifted-manifold", "held-out-class", "nss", "ss"}));
  synth_cmd->add_option("--name", synth.name);
  synth_cmd->add_option("--dim", synth.spec.dim);
  synth_cmd->add_option("--classes", synth.spec.classes);
  synth_cmd->add_option("--train-per-class", synth.spec.train_per_class);
  synth_cmd->add_option("--val-per-class", synth.spec.val_per_class);
  synth_cmd->add_option("--test-per-class", synth.spec.test_per_class);
  synth_cmd->add_option("--ood-count", synth.spec.ood_count);
  synth_cmd->add_option("--offset-sigmas", synth.spec.ood_offset_sigmas);

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a pair config's files");
  validate_cmd->add_option("pair", validate.pair)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*fit_cmd) {
      fit.threads = threads;
      CmdFit(fit);
    } else if (*score_cmd) {
      score.threads = threads;
      CmdScore(score);
    } else if (*calibrate_cmd) {
      if (!CmdCalibrate(calibrate)) {
        err << "oodx: warning: degenerate calibration (zero spread); "
               "normalized values will be 0\n";
      }
    } else if (*fuse_cmd) {
      if (!fuse_norm.empty()) fuse.normalization = fuse_norm;
      CmdFuse(fuse);
    } else if (*eval_cmd) {
      const EvalReport r = CmdEval(eval);
      for (const auto& w : r.warnings) err << "oodx: warning: " << w << '\n';
      out << r.TableRow() << '\n';
    } else if (*ensemble_cmd) {
      CmdEnsemble(ensemble);
    } else if (*pipeline_cmd) {
      pipeline.threads = threads;
      pipeline.detectors = SplitList(pipeline_detectors);
      for (const auto& r : CmdPipeline(pipeline)) out << r.TableRow() << '\n';
    } else if (*synth_cmd) {
      synth.spec.mode = ParseOodMode(synth_mode);
      const auto config = CmdSynth(synth);
      out << (synth.out / (synth.name + ".pair.json")).string() << '\n';
    } else if (*validate_cmd) {
      const auto issues = CmdValidate(validate);
      out << IssuesToJson(issues).dump(2) << '\n';
      return issues.empty() ? 0 : 1;
    }
  } catch (const Error& e) {
    PrintError(err, json_errors, e.name(), e.what(), e.path());
    return 2;
  } catch (const fs::filesystem_error& e) {
    PrintError(err, json_errors, "IoError", e.what(), e.path1().string());
    return 2;
  } catch (const std::exception& e) {
    PrintError(err, json_errors, "InternalError", e.what(), {});
    return 3;
  }
  return 0;
}

}  // namespace oodx::cli
