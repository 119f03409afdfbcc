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
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace sonify {

// Depth of the object from the near table edge, in meters.
struct DepthMeters {
  double value = 0.0;
};

// Horizontal angle of the object, -90 (left ear) to +90 (right ear).
struct AzimuthDegrees {
  double value = 0.0;
};

enum class SonificationKind { kFreq, kAmp, kReverb, kBrr, kSnr };

inline constexpr std::array<SonificationKind, 5> kAllKinds = {
    SonificationKind::kFreq, SonificationKind::kAmp, SonificationKind::kReverb,
    SonificationKind::kBrr, SonificationKind::kSnr};

// Lower-case CLI/log name ("freq", "amp", "reverb", "brr", "snr").
std::string_view KindName(SonificationKind kind);
// Display name as used in reports ("Freq", "Amp", "Reverb", "BRR", "SNR").
std::string_view KindLabel(SonificationKind kind);
// Accepts either form, case-insensitive. Throws Error(kInvalidArgument).
SonificationKind ParseKind(std::string_view name);

// One depth encoding: the parameter at 0 m and 1 m plus carrier settings.
// Parameter units per kind: Freq MIDI note, Amp dB, Reverb RT60 seconds,
// BRR repetitions per second, SNR linear tone/noise amplitude ratio.
struct SonificationSpec {
  SonificationKind kind = SonificationKind::kFreq;
  double p_at_0m = 0.0;
  double p_at_1m = 0.0;
  double carrier_hz = 0.0;  // unused by Freq, whose pitch is the parameter
  int sample_rate = 44100;
  bool quantize_semitones = false;

  static SonificationSpec Default(SonificationKind kind,
                                  int sample_rate = 44100);

  double param_min() const;
  double param_max() const;
  // Throws Error(kInvalidArgument) if the endpoints coincide or the
  // carrier/sample rate are unusable.
  void Validate() const;
};

// Linear depth-to-parameter map. Depth is clamped to [0, 1] m, so the
// parameter stays fixed outside the table. Throws Error(kDomain) on NaN/inf.
double MapDepth(DepthMeters depth, const SonificationSpec& spec);

// Inverse of MapDepth on the parameter interval. Throws Error(kOutOfRange)
// when the parameter lies outside [param_min, param_max].
DepthMeters UnmapParam(double param, const SonificationSpec& spec);

double MidiToHz(double midi, bool quantize_semitones = false);

struct PanGains {
  double left = 0.5;
  double right = 0.5;
  bool clamped = false;
};

// Linear amplitude pan; left + right == 1.
PanGains PanFromAzimuth(AzimuthDegrees az);

// exp(-39 t) restarted every 1/tau seconds.
double BeepEnvelope(double t, double tau);

// Tone and noise weights of the SNR signal; they sum to one.
std::pair<double, double> SnrWeights(double ratio);

}  // namespace sonify
