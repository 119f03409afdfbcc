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
#include <span>
#include <vector>

#include "audio.hpp"
#include "rt60.hpp"

namespace sonify {

inline constexpr int kNumCombs = 8;
inline constexpr int kNumAllpasses = 4;

// Lowest and highest reverberation times calibrate() accepts.
inline constexpr double kMinReverbTime = 0.048;
inline constexpr double kMaxReverbTime = 1.5;

struct FreeverbConfig {
  std::array<int, kNumCombs> comb_delays{};
  double comb_feedback = 0.84;
  double comb_damping = 0.2;
  std::array<int, kNumAllpasses> allpass_delays{};
  double allpass_coefficient = 0.5;
  double wet_mix = 1.0;      // dry = 1 - wet
  double wet_gain = 0.015;   // input gain into the comb bank

  // Canonical Freeverb tunings scaled to `sample_rate`.
  static FreeverbConfig Canonical(int sample_rate);

  // Throws Error(kInvalidArgument) on duplicate delays or unstable loops.
  void Validate() const;
};

// Mono Schroeder/Freeverb network: 8 parallel low-pass feedback combs into
// 4 series allpasses. Buffers are sized once; SetConfig() only updates the
// gains, so it is safe on the audio path as long as the delays match.
class Freeverb {
 public:
  explicit Freeverb(const FreeverbConfig& config);

  // Delay lengths must equal the ones the instance was built with.
  void SetConfig(const FreeverbConfig& config);
  const FreeverbConfig& config() const { return config_; }

  float Process(float input);
  void Process(std::span<const float> in, std::span<float> out);
  void Reset();

 private:
  struct Comb {
    std::vector<float> buffer;
    std::size_t index = 0;
    float filter_store = 0.0f;
  };
  struct Allpass {
    std::vector<float> buffer;
    std::size_t index = 0;
  };

  FreeverbConfig config_;
  std::array<Comb, kNumCombs> combs_;
  std::array<Allpass, kNumAllpasses> allpasses_;
  float feedback_ = 0.0f, damp1_ = 0.0f, damp2_ = 0.0f, ap_gain_ = 0.0f;
  float wet_ = 0.0f, dry_ = 0.0f, in_gain_ = 0.0f;
};

// Reverberation-time calibration for one sample rate. Design values come
// from the comb decay relation (feedback^(t / delay) reaching -60 dB) and
// are corrected against closed-loop RT60 measurements taken once, at
// construction, on a grid of design times.
class ReverbCalibration {
 public:
  explicit ReverbCalibration(int sample_rate);

  // Shared instance per sample rate; construction is thread-safe.
  static const ReverbCalibration& ForSampleRate(int sample_rate);

  int sample_rate() const { return sample_rate_; }

  // Throws Error(kOutOfRange) naming [kMinReverbTime, kMaxReverbTime].
  FreeverbConfig Calibrate(double rt60_s) const;

  // Config from the uncorrected decay relation.
  FreeverbConfig Design(double design_rt_s) const;

 private:
  struct Point {
    double design_rt;
    double measured_rt;
  };

  int sample_rate_;
  std::vector<Point> table_;
};

FreeverbConfig Calibrate(double rt60_s, int sample_rate = 44100);

// Wet response to a unit impulse, long enough to decay below -80 dB.
std::vector<float> ImpulseResponse(const FreeverbConfig& config,
                                   int sample_rate, double length_s);

// Runs each channel through its own network calibrated to `rt60_s`. The
// output is the input length plus a tail, truncated once both channels
// stay `tail_floor_db` below the output peak.
AudioBlock Reverberate(const AudioBlock& input, double rt60_s,
                       double tail_floor_db = -80.0);

}  // namespace sonify
