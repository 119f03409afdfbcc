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

#include "freeverb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "error.hpp"

namespace sonify {

namespace {

constexpr std::array<int, kNumCombs> kCombTuning = {1116, 1188, 1277, 1356,
                                                    1422, 1491, 1557, 1617};
constexpr std::array<int, kNumAllpasses> kAllpassTuning = {556, 441, 341, 225};

constexpr double kMaxFeedback = 0.985;
constexpr double kMaxAllpass = 0.5;

// Length that lets a response with the given decay fall well past -80 dB.
double IrLengthFor(double rt) { return std::max(0.6, 5.0 * rt + 0.1); }

}  // namespace

FreeverbConfig FreeverbConfig::Canonical(int sample_rate) {
  FreeverbConfig c;
  const double scale = sample_rate / 44100.0;
  for (int i = 0; i < kNumCombs; ++i) {
    c.comb_delays[i] = std::max(1, static_cast<int>(std::lround(kCombTuning[i] * scale)));
  }
  for (int i = 0; i < kNumAllpasses; ++i) {
    c.allpass_delays[i] = std::max(1, static_cast<int>(std::lround(kAllpassTuning[i] * scale)));
  }
  return c;
}

void FreeverbConfig::Validate() const {
  std::array<int, kNumCombs + kNumAllpasses> delays{};
  std::copy(comb_delays.begin(), comb_delays.end(), delays.begin());
  std::copy(allpass_delays.begin(), allpass_delays.end(),
            delays.begin() + kNumCombs);
  std::sort(delays.begin(), delays.end());
  if (delays.front() <= 0 ||
      std::adjacent_find(delays.begin(), delays.end()) != delays.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "delay lengths must be positive and pairwise distinct");
  }
  if (!(comb_feedback > 0.0 && comb_feedback < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "comb feedback must lie in (0, 1)");
  }
  if (!(comb_damping >= 0.0 && comb_damping < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "comb damping must lie in [0, 1)");
  }
  if (!(std::abs(allpass_coefficient) < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "allpass coefficient must satisfy |g| < 1");
  }
  if (!(wet_mix >= 0.0 && wet_mix <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "wet mix must lie in [0, 1]");
  }
}

Freeverb::Freeverb(const FreeverbConfig& config) : config_(config) {
  config_.Validate();
  for (int i = 0; i < kNumCombs; ++i) {
    combs_[i].buffer.assign(config_.comb_delays[i], 0.0f);
  }
  for (int i = 0; i < kNumAllpasses; ++i) {
    allpasses_[i].buffer.assign(config_.allpass_delays[i], 0.0f);
  }
  SetConfig(config_);
}

void Freeverb::SetConfig(const FreeverbConfig& config) {
  if (config.comb_delays != config_.comb_delays ||
      config.allpass_delays != config_.allpass_delays) {
    throw Error(ErrorCode::kInvalidArgument,
                "delay lengths cannot change on a live reverberator");
  }
  config.Validate();
  config_ = config;
  feedback_ = static_cast<float>(config.comb_feedback);
  damp1_ = static_cast<float>(config.comb_damping);
  damp2_ = 1.0f - damp1_;
  ap_gain_ = static_cast<float>(config.allpass_coefficient);
  wet_ = static_cast<float>(config.wet_mix);
  dry_ = 1.0f - wet_;
  in_gain_ = static_cast<float>(config.wet_gain);
}

float Freeverb::Process(float input) {
  const float x = input * in_gain_;
  float acc = 0.0f;
  for (Comb& c : combs_) {
    const float out = c.buffer[c.index];
    c.filter_store = out * damp2_ + c.filter_store * damp1_;
    c.buffer[c.index] = x + c.filter_store * feedback_;
    if (++c.index == c.buffer.size()) c.index = 0;
    acc += out;
  }
  for (Allpass& a : allpasses_) {
    const float buffered = a.buffer[a.index];
    const float out = buffered - acc;
    a.buffer[a.index] = acc + buffered * ap_gain_;
    if (++a.index == a.buffer.size()) a.index = 0;
    acc = out;
  }
  return acc * wet_ + input * dry_;
}

void Freeverb::Process(std::span<const float> in, std::span<float> out) {
  const std::size_t n = std::min(in.size(), out.size());
  for (std::size_t i = 0; i < n; ++i) out[i] = Process(in[i]);
}

void Freeverb::Reset() {
  for (Comb& c : combs_) {
    std::fill(c.buffer.begin(), c.buffer.end(), 0.0f);
    c.index = 0;
    c.filter_store = 0.0f;
  }
  for (Allpass& a : allpasses_) {
    std::fill(a.buffer.begin(), a.buffer.end(), 0.0f);
    a.index = 0;
  }
}

std::vector<float> ImpulseResponse(const FreeverbConfig& config,
                                   int sample_rate, double length_s) {
  FreeverbConfig wet = config;
  wet.wet_mix = 1.0;
  Freeverb reverb(wet);
  const auto n = static_cast<std::size_t>(std::ceil(length_s * sample_rate));
  std::vector<float> ir(n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) ir[i] = reverb.Process(i == 0 ? 1.0f : 0.0f);
  return ir;
}

ReverbCalibration::ReverbCalibration(int sample_rate)
    : sample_rate_(sample_rate) {
  if (sample_rate < 8000) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate too low for reverb");
  }
  constexpr int kGrid = 64;
  const double lo = 0.02, hi = 2.0;
  // Walk from long to short design times; below ~30 ms the comb pre-delay
  // dominates and the measurement stops being monotone, so only points that
  // keep the measured RT60 strictly decreasing are retained.
  for (int i = kGrid - 1; i >= 0; --i) {
    const double design = lo * std::pow(hi / lo, static_cast<double>(i) / (kGrid - 1));
    const FreeverbConfig cfg = Design(design);
    const std::vector<float> ir = ImpulseResponse(cfg, sample_rate, IrLengthFor(design));
    double measured = 0.0;
    try {
      measured = MeasureRt60(ir, sample_rate).rt60_s;
    } catch (const Error&) {
      continue;
    }
    if (!table_.empty() && measured >= table_.back().measured_rt) continue;
    table_.push_back({design, measured});
  }
  std::reverse(table_.begin(), table_.end());
  if (table_.size() < 2 || table_.front().measured_rt > kMinReverbTime ||
      table_.back().measured_rt < kMaxReverbTime) {
    throw Error(ErrorCode::kInternal,
                "reverb calibration grid does not span the supported range");
  }
}

const ReverbCalibration& ReverbCalibration::ForSampleRate(int sample_rate) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<ReverbCalibration>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[sample_rate];
  if (!slot) slot = std::make_unique<ReverbCalibration>(sample_rate);
  return *slot;
}

FreeverbConfig ReverbCalibration::Design(double design_rt_s) const {
  FreeverbConfig cfg = FreeverbConfig::Canonical(sample_rate_);
  const double mean_delay =
      std::accumulate(cfg.comb_delays.begin(), cfg.comb_delays.end(), 0.0) /
      kNumCombs / sample_rate_;
  const double longest_allpass =
      *std::max_element(cfg.allpass_delays.begin(), cfg.allpass_delays.end()) /
      static_cast<double>(sample_rate_);
  // One pass through a loop of length T scales the level by g, so the loop
  // needs g = 10^(-3 T / RT) to lose 60 dB in RT seconds.
  cfg.comb_feedback =
      std::min(kMaxFeedback, std::pow(10.0, -3.0 * mean_delay / design_rt_s));
  cfg.allpass_coefficient =
      std::min(kMaxAllpass, std::pow(10.0, -3.0 * longest_allpass / design_rt_s));
  return cfg;
}

FreeverbConfig ReverbCalibration::Calibrate(double rt60_s) const {
  if (!(rt60_s >= kMinReverbTime && rt60_s <= kMaxReverbTime)) {
    throw Error(ErrorCode::kOutOfRange,
                "reverberation time " + std::to_string(rt60_s) +
                    " s outside achievable range [" +
                    std::to_string(kMinReverbTime) + ", " +
                    std::to_string(kMaxReverbTime) + "] s");
  }
  const auto upper = std::lower_bound(
      table_.begin(), table_.end(), rt60_s,
      [](const Point& p, double rt) { return p.measured_rt < rt; });
  const Point& hi = *upper;
  const Point& lo = upper == table_.begin() ? *upper : *(upper - 1);
  double w = 0.0;
  if (hi.measured_rt != lo.measured_rt) {
    w = std::log(rt60_s / lo.measured_rt) / std::log(hi.measured_rt / lo.measured_rt);
  }
  const double design =
      std::exp(std::lerp(std::log(lo.design_rt), std::log(hi.design_rt), w));
  return Design(design);
}

FreeverbConfig Calibrate(double rt60_s, int sample_rate) {
  return ReverbCalibration::ForSampleRate(sample_rate).Calibrate(rt60_s);
}

AudioBlock Reverberate(const AudioBlock& input, double rt60_s,
                       double tail_floor_db) {
  const FreeverbConfig cfg = Calibrate(rt60_s, input.sample_rate);
  const auto tail = static_cast<std::size_t>(
      std::ceil(IrLengthFor(rt60_s) * input.sample_rate));
  AudioBlock out(input.frames() + tail, input.sample_rate);
  Freeverb left(cfg), right(cfg);
  for (std::size_t i = 0; i < out.frames(); ++i) {
    const bool in_range = i < input.frames();
    out.left[i] = left.Process(in_range ? input.left[i] : 0.0f);
    out.right[i] = right.Process(in_range ? input.right[i] : 0.0f);
  }

  // Truncate the tail where both channels stay below the floor.
  const float peak = PeakAbs(out);
  if (peak > 0.0f) {
    const float floor = peak * static_cast<float>(std::pow(10.0, tail_floor_db / 20.0));
    std::size_t last = input.frames();
    for (std::size_t i = out.frames(); i-- > input.frames();) {
      if (std::abs(out.left[i]) > floor || std::abs(out.right[i]) > floor) {
        last = i + 1;
        break;
      }
    }
    out.left.resize(last);
    out.right.resize(last);
  } else {
    out.left.resize(input.frames());
    out.right.resize(input.frames());
  }
  return out;
}

}  // namespace sonify
