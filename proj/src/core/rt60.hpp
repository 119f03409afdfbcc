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

#include <span>
#include <vector>

#include "audio.hpp"

namespace sonify {

// Schroeder energy decay curve of a band-limited impulse response.
struct DecayCurve {
  std::vector<double> time_s;
  std::vector<double> level_db;  // 0 dB at t = 0, non-increasing
  double rt60_s = 0.0;
  double fit_start_s = 0.0;      // where the curve crosses -5 dB
  double fit_end_s = 0.0;        // where the curve crosses -35 dB
  double dynamic_range_db = 0.0; // lowest finite level reached
};

struct Rt60Options {
  double lowpass_hz = 1500.0;
  double fit_upper_db = -5.0;
  double fit_lower_db = -35.0;
};

// Low-passes the response (4th-order Butterworth), backward-integrates the
// energy, fits a line to the decay between the two fit levels and
// extrapolates it to -60 dB. Throws Error(kInsufficient) when the decay
// never reaches the lower fit level, reporting the achieved range.
DecayCurve MeasureRt60(std::span<const float> impulse_response,
                       int sample_rate, const Rt60Options& options = {});

// Uses the left channel.
DecayCurve MeasureRt60(const AudioBlock& impulse_response,
                       const Rt60Options& options = {});

// Cascade of two RBJ low-pass biquads forming a 4th-order Butterworth.
class ButterworthLowpass4 {
 public:
  ButterworthLowpass4(double cutoff_hz, int sample_rate);
  double Process(double x);

 private:
  struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0, z2 = 0.0;
    double Process(double x) {
      const double y = b0 * x + z1;
      z1 = b1 * x - a1 * y + z2;
      z2 = b2 * x - a2 * y;
      return y;
    }
  };
  Biquad stages_[2];
};

}  // namespace sonify
