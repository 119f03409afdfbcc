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
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "audio.hpp"
#include "equal_loudness.hpp"
#include "freeverb.hpp"
#include "mapping.hpp"

namespace sonify {

// Control-rate state driving the renderer.
struct RenderFrame {
  SonificationKind kind = SonificationKind::kFreq;
  double param = 0.0;     // in the kind's encoding units
  double pan = 0.5;       // 0 = full left, 1 = full right
  double timestamp = 0.0; // seconds
};

RenderFrame MakeFrame(const SonificationSpec& spec, DepthMeters depth,
                      std::optional<AzimuthDegrees> azimuth,
                      double timestamp = 0.0);

struct SynthOptions {
  double phon = 60.0;
  double headroom_db = -3.0;    // master peak level before the volume stage
  double volume = 1.0;          // user volume (linear, <= 1)
  double smoothing_ms = 10.0;   // parameter ramp length
  std::uint64_t noise_seed = 0x5eed;
  double beep_gate_s = 0.0;     // > 0 silences beeps after this long
  double reverb_beep_rate_hz = 1.0;
  double reverb_wet_mix = 0.33;  // FreeVerb's stock mix
};

// Counters the render path keeps instead of reporting errors.
struct RenderDiagnostics {
  std::uint64_t clipped_samples = 0;
  std::uint64_t onsets = 0;         // beep onsets emitted so far
  bool frequency_clamped = false;   // Freq pitch left the contour's domain
};

// Sample-accurate synthesizer for one sonification. All buffers are sized
// at construction; SetTarget() and Render() neither allocate nor block.
class Renderer {
 public:
  Renderer(const SonificationSpec& spec, const SynthOptions& options = {});

  // Starts sound on the first call; later calls ramp to the new values.
  void SetTarget(double param, double pan);
  void Render(std::span<float> left, std::span<float> right);

  bool active() const { return active_; }
  const RenderDiagnostics& diagnostics() const { return diag_; }
  const SonificationSpec& spec() const { return spec_; }

 private:
  double NextMono();
  void UpdateReverb();

  SonificationSpec spec_;
  SynthOptions options_;
  double inv_rate_;
  double master_gain_;
  int ramp_len_;
  EqualLoudnessCurve curve_;
  const ReverbCalibration* reverb_cal_ = nullptr;
  std::unique_ptr<Freeverb> reverb_;

  bool active_ = false;
  double param_ = 0.0, param_target_ = 0.0, param_step_ = 0.0;
  double pan_ = 0.5, pan_target_ = 0.5, pan_step_ = 0.0;
  int ramp_left_ = 0;

  double carrier_phase_ = 0.0;     // cycles, wrapped to [0, 1)
  double beep_phase_ = 0.0;        // cycles of the repetition rate
  double since_onset_ = 0.0;       // seconds since the last beep onset
  bool pending_onset_ = true;
  double reverb_rt_applied_ = -1.0;
  int reverb_countdown_ = 0;
  std::mt19937_64 noise_;
  RenderDiagnostics diag_;
};

// Renders `duration_s` seconds, applying each frame at its timestamp.
// Frames must be sorted; an empty list renders silence. Frames for a
// different kind are rejected.
AudioBlock Synthesize(const SonificationSpec& spec,
                      std::span<const RenderFrame> frames, double duration_s,
                      const SynthOptions& options = {},
                      RenderDiagnostics* diagnostics = nullptr);

// Latest-value handoff from one control thread to one render thread
// (triple buffer). Publish() and Consume() are wait-free.
class FrameMailbox {
 public:
  void Publish(const RenderFrame& frame);
  // Returns the newest frame published since the previous call, if any.
  std::optional<RenderFrame> Consume();

 private:
  static constexpr unsigned kDirty = 4;
  std::array<RenderFrame, 3> slots_{};
  unsigned back_ = 0;                   // writer-owned
  unsigned front_ = 1;                  // reader-owned
  std::atomic<unsigned> middle_{2};     // slot index | kDirty
};

// Renderer fed through a FrameMailbox: the control side pushes frames, the
// audio side pulls blocks and picks up the newest frame at block starts.
class StreamingEngine {
 public:
  StreamingEngine(const SonificationSpec& spec, const SynthOptions& options = {});

  void Push(const RenderFrame& frame) { mailbox_.Publish(frame); }
  void Process(std::span<float> left, std::span<float> right);
  const Renderer& renderer() const { return renderer_; }

 private:
  FrameMailbox mailbox_;
  Renderer renderer_;
};

}  // namespace sonify
