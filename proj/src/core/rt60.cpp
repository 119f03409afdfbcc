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

#include "rt60.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace sonify {

ButterworthLowpass4::ButterworthLowpass4(double cutoff_hz, int sample_rate) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "cutoff must lie in (0, Nyquist)");
  }
  // Pole-pair Qs of a 4th-order Butterworth.
  const double qs[2] = {0.54119610014619701, 1.3065629648763766};
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double cw = std::cos(w0);
  for (int i = 0; i < 2; ++i) {
    const double alpha = std::sin(w0) / (2.0 * qs[i]);
    const double a0 = 1.0 + alpha;
    Biquad& s = stages_[i];
    s.b0 = (1.0 - cw) / 2.0 / a0;
    s.b1 = (1.0 - cw) / a0;
    s.b2 = s.b0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;
  }
}

double ButterworthLowpass4::Process(double x) {
  return stages_[1].Process(stages_[0].Process(x));
}

DecayCurve MeasureRt60(std::span<const float> impulse_response,
                       int sample_rate, const Rt60Options& options) {
  if (impulse_response.empty()) {
    throw Error(ErrorCode::kInsufficient, "empty impulse response");
  }
  ButterworthLowpass4 lowpass(options.lowpass_hz, sample_rate);
  std::vector<double> energy(impulse_response.size());
  for (std::size_t i = 0; i < impulse_response.size(); ++i) {
    const double y = lowpass.Process(impulse_response[i]);
    energy[i] = y * y;
  }

  // Backward integration.
  std::vector<double> edc(energy.size());
  double acc = 0.0;
  for (std::size_t i = energy.size(); i-- > 0;) {
    acc += energy[i];
    edc[i] = acc;
  }
  const double total = edc.front();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kInsufficient, "impulse response is silent");
  }

  DecayCurve curve;
  curve.time_s.resize(edc.size());
  curve.level_db.resize(edc.size());
  double lowest = 0.0;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    curve.time_s[i] = static_cast<double>(i) / sample_rate;
    const double level =
        edc[i] > 0.0 ? 10.0 * std::log10(edc[i] / total) : -400.0;
    curve.level_db[i] = level;
    if (edc[i] > 0.0) lowest = level;
  }
  curve.dynamic_range_db = -lowest;

  std::size_t start = edc.size();
  std::size_t end = edc.size();
  for (std::size_t i = 0; i < edc.size(); ++i) {
    if (start == edc.size() && curve.level_db[i] <= options.fit_upper_db) {
      start = i;
    }
    if (curve.level_db[i] <= options.fit_lower_db) {
      end = i;
      break;
    }
  }
  if (end == edc.size() || start >= end) {
    throw Error(ErrorCode::kInsufficient,
                "decay reaches only " + std::to_string(lowest) +
                    " dB; need " + std::to_string(options.fit_lower_db) +
                    " dB");
  }

  // Backward integration of a response that never decays still drops
  // steeply in its final samples; a genuine decay crosses the lower fit
  // level well before the end of the buffer.
  if (edc.size() - end < edc.size() / 20) {
    double level_at_95 = curve.level_db[edc.size() - edc.size() / 20 - 1];
    throw Error(ErrorCode::kInsufficient,
                "response does not decay: decay curve is at " +
                    std::to_string(level_at_95) + " dB at 95% of its length; need " +
                    std::to_string(options.fit_lower_db) + " dB");
  }

  // Least-squares slope of level vs time over the fit window.
  const double n = static_cast<double>(end - start + 1);
  double st = 0.0, sl = 0.0;
  for (std::size_t i = start; i <= end; ++i) {
    st += curve.time_s[i];
    sl += curve.level_db[i];
  }
  const double mt = st / n, ml = sl / n;
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = start; i <= end; ++i) {
    const double dt = curve.time_s[i] - mt;
    stt += dt * dt;
    stl += dt * (curve.level_db[i] - ml);
  }
  double slope = 0.0;
  if (stt > 0.0) {
    slope = stl / stt;
  } else {
    // Single-sample drop: fall back to the endpoint slope.
    slope = (options.fit_lower_db - options.fit_upper_db) /
            (1.0 / sample_rate);
  }
  if (!(slope < 0.0)) {
    throw Error(ErrorCode::kInsufficient, "decay curve has no negative slope");
  }
  curve.rt60_s = -60.0 / slope;
  curve.fit_start_s = curve.time_s[start];
  curve.fit_end_s = curve.time_s[end];
  return curve;
}

DecayCurve MeasureRt60(const AudioBlock& impulse_response,
                       const Rt60Options& options) {
  return MeasureRt60(impulse_response.left, impulse_response.sample_rate,
                     options);
}

}  // namespace sonify
