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

#include "mapping.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <string>

#include "error.hpp"

namespace sonify {

namespace {

struct KindInfo {
  SonificationKind kind;
  std::string_view name;
  std::string_view label;
  double p0;
  double p1;
  double carrier;
};

constexpr std::array<KindInfo, 5> kKindTable = {{
    {SonificationKind::kFreq, "freq", "Freq", 107.0, 48.0, 0.0},
    {SonificationKind::kAmp, "amp", "Amp", 0.0, -40.0, 500.0},
    {SonificationKind::kReverb, "reverb", "Reverb", 0.05, 0.95, 1200.0},
    {SonificationKind::kBrr, "brr", "BRR", 10.0, 1.0, 1200.0},
    {SonificationKind::kSnr, "snr", "SNR", 20.0, 0.05, 500.0},
}};

const KindInfo& Info(SonificationKind kind) {
  for (const auto& info : kKindTable) {
    if (info.kind == kind) return info;
  }
  throw Error(ErrorCode::kInternal, "unknown sonification kind");
}

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view KindName(SonificationKind kind) { return Info(kind).name; }
std::string_view KindLabel(SonificationKind kind) { return Info(kind).label; }

SonificationKind ParseKind(std::string_view name) {
  const std::string lower = Lower(name);
  for (const auto& info : kKindTable) {
    if (lower == info.name) return info.kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown sonification '" + std::string(name) +
                  "' (expected freq|amp|reverb|brr|snr)");
}

SonificationSpec SonificationSpec::Default(SonificationKind kind,
                                           int sample_rate) {
  const KindInfo& info = Info(kind);
  SonificationSpec spec;
  spec.kind = kind;
  spec.p_at_0m = info.p0;
  spec.p_at_1m = info.p1;
  spec.carrier_hz = info.carrier;
  spec.sample_rate = sample_rate;
  return spec;
}

double SonificationSpec::param_min() const { return std::min(p_at_0m, p_at_1m); }
double SonificationSpec::param_max() const { return std::max(p_at_0m, p_at_1m); }

void SonificationSpec::Validate() const {
  if (!std::isfinite(p_at_0m) || !std::isfinite(p_at_1m)) {
    throw Error(ErrorCode::kInvalidArgument, "parameter endpoints must be finite");
  }
  if (p_at_0m == p_at_1m) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter endpoints at 0 m and 1 m must differ");
  }
  if (sample_rate < 8000 || sample_rate > 384000) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample rate out of range: " + std::to_string(sample_rate));
  }
  if (kind != SonificationKind::kFreq &&
      !(carrier_hz > 0.0 && carrier_hz < 0.5 * sample_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "carrier must lie in (0, Nyquist)");
  }
  if (kind == SonificationKind::kBrr && param_min() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "repetition rate must be positive");
  }
  if (kind == SonificationKind::kSnr && param_min() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "SNR ratio must be positive");
  }
  if (kind == SonificationKind::kReverb && param_min() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "reverberation time must be positive");
  }
}

double MapDepth(DepthMeters depth, const SonificationSpec& spec) {
  if (!std::isfinite(depth.value)) {
    throw Error(ErrorCode::kDomain, "depth must be finite");
  }
  const double d = std::clamp(depth.value, 0.0, 1.0);
  // std::lerp is exact at both endpoints and monotone in between.
  return std::lerp(spec.p_at_0m, spec.p_at_1m, d);
}

DepthMeters UnmapParam(double param, const SonificationSpec& spec) {
  if (!std::isfinite(param) || param < spec.param_min() ||
      param > spec.param_max()) {
    throw Error(ErrorCode::kOutOfRange,
                "parameter " + std::to_string(param) + " outside [" +
                    std::to_string(spec.param_min()) + ", " +
                    std::to_string(spec.param_max()) + "]");
  }
  if (param == spec.p_at_1m) return {1.0};
  return {(param - spec.p_at_0m) / (spec.p_at_1m - spec.p_at_0m)};
}

double MidiToHz(double midi, bool quantize_semitones) {
  const double m = quantize_semitones ? std::round(midi) : midi;
  return 440.0 * std::exp2((m - 69.0) / 12.0);
}

PanGains PanFromAzimuth(AzimuthDegrees az) {
  PanGains gains;
  double a = az.value;
  if (!std::isfinite(a)) {
    a = 0.0;
    gains.clamped = true;
  } else if (a < -90.0 || a > 90.0) {
    a = std::clamp(a, -90.0, 90.0);
    gains.clamped = true;
  }
  gains.right = (a + 90.0) / 180.0;
  gains.left = 1.0 - gains.right;
  return gains;
}

double BeepEnvelope(double t, double tau) {
  const double period = 1.0 / tau;
  double local = std::fmod(t, period);
  if (local < 0.0) local += period;
  return std::exp(-39.0 * local);
}

std::pair<double, double> SnrWeights(double ratio) {
  const double tone = ratio / (1.0 + ratio);
  const double noise = 1.0 / (1.0 + ratio);
  assert(std::abs(tone + noise - 1.0) < 1e-12);
  return {tone, noise};
}

}  // namespace sonify
