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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "audio.hpp"
#include "mapping.hpp"
#include "synth.hpp"

namespace sonify {

struct StaircaseConfig {
  double base_depth_m = 0.05;
  double initial_delta_m = 0.10;
  double down = 0.8;     // applied after a correct answer
  double up = 1.25;      // applied after an incorrect answer
  int max_trials = 20;
  int alternation_pairs = 5;  // stop after this many right-then-wrong pairs
  // Relative weights of r = -1, 0, +1.
  std::array<double, 3> r_weights = {1.0, 1.0, 1.0};

  void Validate() const;
};

enum class Answer { kDifferent, kSame };
enum class Termination { kRunning, kMaxTrials, kAlternation };

const char* TerminationName(Termination t);

struct Stimulus {
  int r = 0;
  double delta_m = 0.0;
  double first_depth_m = 0.0;
  double second_depth_m = 0.0;  // clamped to [0, 1]
  bool clamped = false;
};

struct StaircaseTrial {
  int index = 0;               // 1-based
  double base_depth_m = 0.0;
  int r = 0;
  double delta_m = 0.0;
  Answer answer = Answer::kSame;
  bool correct = false;
  bool clamped = false;
};

struct JndEstimate {
  double jnd_m = 0.0;
  int trials = 0;
  Termination reason = Termination::kRunning;
};

bool IsCorrect(int r, Answer answer);

// Adaptive staircase: the depth step shrinks after correct answers and
// grows after incorrect ones.
class Staircase {
 public:
  Staircase(StaircaseConfig config, std::uint64_t seed);

  // Stimulus for the next trial; repeated calls return the same one until
  // it is answered. Throws Error(kState) once terminated.
  const Stimulus& Next();

  // Scores the pending stimulus and updates the step. Throws Error(kState)
  // after termination.
  void Step(Answer answer);

  Termination termination() const { return termination_; }
  bool finished() const { return termination_ != Termination::kRunning; }
  double delta() const { return delta_; }
  const std::vector<StaircaseTrial>& trials() const { return trials_; }
  const StaircaseConfig& config() const { return config_; }

 private:
  StaircaseConfig config_;
  std::mt19937_64 rng_;
  double delta_;
  std::optional<Stimulus> pending_;
  std::vector<StaircaseTrial> trials_;
  Termination termination_ = Termination::kRunning;
};

// Mean step over the final five trials. Throws Error(kInsufficient) with
// fewer than five trials.
JndEstimate Estimate(std::span<const StaircaseTrial> trials,
                     Termination reason = Termination::kMaxTrials);

using Listener = std::function<Answer(int r, double delta_m)>;

// Answers "different" iff |r * delta| >= threshold, flipped with
// probability `lapse_rate`.
Listener SimulatedListener(double threshold_m, double lapse_rate = 0.0,
                           std::uint64_t seed = 1);

struct StaircaseRun {
  std::vector<StaircaseTrial> trials;
  JndEstimate estimate;
};

StaircaseRun RunStaircase(const StaircaseConfig& config, const Listener& listener,
                          std::uint64_t seed);

struct StimulusPair {
  AudioBlock first;
  AudioBlock second;
  double second_depth_m = 0.0;
  bool clamped = false;
};

// Two renders differing only in depth (same noise seed for SNR).
StimulusPair RenderPair(double base_depth_m, int r, double delta_m,
                        const SonificationSpec& spec,
                        const SynthOptions& options = {},
                        double tone_seconds = 1.0);

}  // namespace sonify
