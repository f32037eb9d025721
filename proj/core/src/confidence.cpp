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

#include <algorithm>
#include <cmath>

#include "oodx/detectors.hpp"

namespace oodx {

namespace {

// Log-softmax of logits / temperature, in double.
std::vector<double> LogSoftmax(std::span<const float> logits, double temperature) {
  std::vector<double> x(logits.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    x[i] = static_cast<double>(logits[i]) / temperature;
    m = std::max(m, x[i]);
  }
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - m);
  const double log_z = m + std::log(sum);
  for (double& v : x) v -= log_z;
  return x;
}

ScoreVector Prepare(const LogitSet& logits, std::string detector) {
  logits.Validate();
  ScoreVector out;
  out.detector = std::move(detector);
  out.ids = logits.ids;
  out.scores.resize(logits.size());
  return out;
}

}  // namespace

double MaxSoftmax(std::span<const float> logits, double temperature) {
  double m = -std::numeric_limits<double>::infinity();
  for (float f : logits) m = std::max(m, static_cast<double>(f) / temperature);
  double sum = 0.0;
  for (float f : logits) sum += std::exp(static_cast<double>(f) / temperature - m);
  return 1.0 / sum;
}

double KlToUniform(std::span<const float> logits) {
  const auto log_p = LogSoftmax(logits, 1.0);
  const double log_c = std::log(static_cast<double>(logits.size()));
  double kl = 0.0;
  for (double lp : log_p) kl += std::exp(lp) * (lp + log_c);
  return std::clamp(kl, 0.0, log_c);
}

double NegLogSumExp(std::span<const float> logits) {
  double m = -std::numeric_limits<double>::infinity();
  for (float f : logits) m = std::max(m, static_cast<double>(f));
  double sum = 0.0;
  for (float f : logits) sum += std::exp(static_cast<double>(f) - m);
  return -(m + std::log(sum));
}

ScoreVector ScaledMsp(const LogitSet& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidInput("temperature must be a positive finite number");
  }
  ScoreVector out = Prepare(logits, "scaling");
  for (std::size_t r = 0; r < logits.size(); ++r) {
    out.scores[r] = MaxSoftmax(logits.logits.row(r), temperature);
  }
  return out;
}

ScoreVector Msp(const LogitSet& logits) {
  ScoreVector out = ScaledMsp(logits, 1.0);
  out.detector = "msp";
  return out;
}

ScoreVector Energy(const LogitSet& logits, EnergyOptions options) {
  ScoreVector out = Prepare(logits, "energy");
  for (std::size_t r = 0; r < logits.size(); ++r) {
    const auto row = logits.logits.row(r);
    if (options.logsumexp) {
      out.scores[r] = NegLogSumExp(row);
      continue;
    }
    double e = 0.0;
    bool saturated = false;
    for (float f : row) {
      double arg = f;
      if (arg > kEnergyExpClamp) {
        arg = kEnergyExpClamp;
        saturated = true;
      }
      e += std::exp(arg);
    }
    if (saturated) out.flagged_rows.push_back(r);
    out.scores[r] = -e;
  }
  return out;
}

ScoreVector D2u(const LogitSet& logits) {
  ScoreVector out = Prepare(logits, "d2u");
  for (std::size_t r = 0; r < logits.size(); ++r) {
    out.scores[r] = KlToUniform(logits.logits.row(r));
  }
  return out;
}

ScoreVector PplScore(const TokenLogProbSet& logprobs) {
  logprobs.Validate();
  ScoreVector out;
  out.detector = "ppl";
  out.ids = logprobs.ids;
  out.scores.resize(logprobs.size());
  for (std::size_t i = 0; i < logprobs.size(); ++i) {
    // Summed in sorted order so the score does not depend on token order.
    std::vector<double> lp = logprobs.logprobs[i];
    std::sort(lp.begin(), lp.end());
    double sum = 0.0;
    for (double v : lp) sum += v;
    out.scores[i] = std::exp(sum / static_cast<double>(lp.size()));
  }
  return out;
}

}  // namespace oodx
