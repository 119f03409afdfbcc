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
#include <map>
#include <optional>
#include <string>

#include "geometry.hpp"
#include "mapping.hpp"
#include "synth.hpp"

namespace sonify {

enum class AudioMode { kClientSynthesisFrames, kServerRenderedStream };

std::string_view AudioModeName(AudioMode mode);

struct ServiceConfig {
  std::string address = "127.0.0.1";
  int port = 8765;
  double frame_rate_hz = 30.0;
  AudioMode audio_mode = AudioMode::kClientSynthesisFrames;
  std::string log_path = "session.jsonl";

  void Validate() const;
};

// Everything a session needs to be reproduced: encodings, synthesis,
// geometry and protocol timings.
struct SessionConfig {
  int sample_rate = 44100;
  std::array<SonificationSpec, 5> specs;
  SynthOptions synth;
  GeometryConfig geometry;
  double break_minutes = 10.0;
  double target_seconds = 2.0;
  double tracking_timeout_s = 0.2;
  ServiceConfig service;

  SessionConfig();

  const SonificationSpec& spec(SonificationKind kind) const {
    return specs[static_cast<int>(kind)];
  }
  SonificationSpec& spec(SonificationKind kind) { return specs[static_cast<int>(kind)]; }

  void Validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
EnvLookup ProcessEnvironment();

// Applies one `key = value` setting. Keys: sample_rate, <kind>.p0,
// <kind>.p1, <kind>.carrier_hz, freq.quantize_semitones, synth.phon,
// synth.headroom_db, synth.volume, synth.smoothing_ms, synth.noise_seed,
// synth.beep_gate_s, geometry.box_edge_cm, geometry.depth_origin_cm,
// geometry.table ("x,d; x,d; ..."), protocol.break_minutes,
// protocol.target_seconds, protocol.tracking_timeout_s, service.address,
// service.port, service.frame_rate_hz, service.audio_mode, service.log_path.
// Throws Error(kConfig) on unknown keys or bad values.
void ApplySetting(SessionConfig& config, const std::string& key, const std::string& value);

// Parses `key = value` lines; '#' starts a comment.
void ApplyConfigText(SessionConfig& config, const std::string& text,
                     const std::string& origin = "config");

// File settings first, then SONIFY_<KEY> variables (key upper-cased,
// '.' replaced by '_'), then validation.
SessionConfig LoadConfig(const std::optional<std::string>& path,
                         const EnvLookup& env = ProcessEnvironment());

// Flat key/value snapshot, the inverse of ApplySetting.
std::map<std::string, std::string> ConfigSettings(const SessionConfig& config);

}  // namespace sonify
