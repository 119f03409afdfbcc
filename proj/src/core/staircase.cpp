// Copyright 2026 The Sonify Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "staircase.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "error.hpp"
#include "protocol.hpp"

namespace sonify {

void StaircaseConfig::Validate() const {
  if (!(base_depth_m >= 0.0 && base_depth_m <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "base depth must lie in [0, 1] m");
  }
  if (!(initial_delta_m > 0.0) || !std::isfinite(initial_delta_m)) {
    throw Error(ErrorCode::kInvalidArgument, "initial step must be positive");
  }
  if (!(down > 0.0 && down < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "down factor must lie in (0, 1)");
  }
  if (!(up > 1.0) || !std::isfinite(up)) {
    throw Error(ErrorCode::kInvalidArgument, "up factor must exceed 1");
  }
  if (max_trials < 5) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 5 trials for an estimate");
  }
  const double total = r_weights[0] + r_weights[1] + r_weights[2];
  if (!(total > 0.0) ||
      std::any_of(r_weights.begin(), r_weights.end(), [](double w) { return w < 0.0; })) {
    throw Error(ErrorCode::kInvalidArgument, "r weights must be non-negative");
  }
}

const char* TerminationName(Termination t) {
  switch (t) {
    case Termination::kRunning: return "running";
    case Termination::kMaxTrials: return "max_trials";
    case Termination::kAlternation: return "alternation_rule";
  }
  return "unknown";
}

bool IsCorrect(int r, Answer answer) {
  return (answer == Answer::kDifferent && r != 0) || (answer == Answer::kSame && r == 0);
}

Staircase::Staircase(StaircaseConfig config, std::uint64_t seed)
    : config_(config), rng_(seed), delta_(config.initial_delta_m) {
  config_.Validate();
}

const Stimulus& Staircase::Next() {
  if (finished()) throw Error(ErrorCode::kState, "staircase already terminated");
  if (!pending_) {
    const double total = config_.r_weights[0] + config_.r_weights[1] + config_.r_weights[2];
    const double u = Uniform01(rng_) * total;
    int r = 1;
    if (u < config_.r_weights[0]) {
      r = -1;
    } else if (u < config_.r_weights[0] + config_.r_weights[1]) {
      r = 0;
    }
    Stimulus s;
    s.r = r;
    s.delta_m = delta_;
    s.first_depth_m = config_.base_depth_m;
    const double raw = config_.base_depth_m + r * delta_;
    s.second_depth_m = std::clamp(raw, 0.0, 1.0);
    s.clamped = s.second_depth_m != raw;
    pending_ = s;
  }
  return *pending_;
}

void Staircase::Step(Answer answer) {
  if (finished()) throw Error(ErrorCode::kState, "step after termination");
  const Stimulus s = Next();
  pending_.reset();
  StaircaseTrial trial;
  trial.index = static_cast<int>(trials_.size()) + 1;
  trial.base_depth_m = s.first_depth_m;
  trial.r = s.r;
  trial.delta_m = s.delta_m;
  trial.answer = answer;
  trial.correct = IsCorrect(s.r, answer);
  trial.clamped = s.clamped;
  trials_.push_back(trial);

  delta_ *= trial.correct ? config_.down : config_.up;

  const int window = 2 * config_.alternation_pairs;
  if (static_cast<int>(trials_.size()) >= window) {
    // Right, wrong, right, wrong, ... ending on a wrong answer.
    bool alternating = true;
    for (int k = 0; k < window; ++k) {
      const StaircaseTrial& t = trials_[trials_.size() - window + k];
      if (t.correct != (k % 2 == 0)) {
        alternating = false;
        break;
      }
    }
    if (alternating) {
      termination_ = Termination::kAlternation;
      return;
    }
  }
  if (static_cast<int>(trials_.size()) >= config_.max_trials) {
    termination_ = Termination::kMaxTrials;
  }
}

JndEstimate Estimate(std::span<const StaircaseTrial> trials, Termination reason) {
  constexpr std::size_t kLast = 5;
  if (trials.size() < kLast) {
    throw Error(ErrorCode::kInsufficient,
                "need at least 5 trials, have " + std::to_string(trials.size()));
  }
  double sum = 0.0;
  for (std::size_t i = trials.size() - kLast; i < trials.size(); ++i) {
    sum += trials[i].delta_m;
  }
  return {sum / kLast, static_cast<int>(trials.size()), reason};
}

Listener SimulatedListener(double threshold_m, double lapse_rate, std::uint64_t seed) {
  if (!(threshold_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "listener threshold must be positive");
  }
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [threshold_m, lapse_rate, rng](int r, double delta_m) {
    Answer a = std::abs(r * delta_m) >= threshold_m ? Answer::kDifferent : Answer::kSame;
    if (lapse_rate > 0.0 && Uniform01(*rng) < lapse_rate) {
      a = a == Answer::kDifferent ? Answer::kSame : Answer::kDifferent;
    }
    return a;
  };
}

StaircaseRun RunStaircase(const StaircaseConfig& config, const Listener& listener,
                          std::uint64_t seed) {
  Staircase staircase(config, seed);
  while (!staircase.finished()) {
    const Stimulus& s = staircase.Next();
    staircase.Step(listener(s.r, s.delta_m));
  }
  StaircaseRun run;
  run.trials = staircase.trials();
  run.estimate = Estimate(run.trials, staircase.termination());
  return run;
}

StimulusPair RenderPair(double base_depth_m, int r, double delta_m,
                        const SonificationSpec& spec, const SynthOptions& options,
                        double tone_seconds) {
  StimulusPair pair;
  const double first = std::clamp(base_depth_m, 0.0, 1.0);
  const double raw = base_depth_m + r * delta_m;
  pair.second_depth_m = std::clamp(raw, 0.0, 1.0);
  pair.clamped = pair.second_depth_m != raw || first != base_depth_m;
  const SpatialTarget a{{first}, std::nullopt};
  const SpatialTarget b{{pair.second_depth_m}, std::nullopt};
  pair.first = PlayTarget(a, spec, options, tone_seconds);
  pair.second = PlayTarget(b, spec, options, tone_seconds);
  return pair;
}

}  // namespace sonify
