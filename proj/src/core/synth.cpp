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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace sonify {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kReverbUpdateInterval = 32;

double UniformNoise(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

RenderFrame MakeFrame(const SonificationSpec& spec, DepthMeters depth,
                      std::optional<AzimuthDegrees> azimuth, double timestamp) {
  RenderFrame frame;
  frame.kind = spec.kind;
  frame.param = MapDepth(depth, spec);
  frame.pan = azimuth ? PanFromAzimuth(*azimuth).right : 0.5;
  frame.timestamp = timestamp;
  return frame;
}

Renderer::Renderer(const SonificationSpec& spec, const SynthOptions& options)
    : spec_(spec),
      options_(options),
      inv_rate_(1.0 / spec.sample_rate),
      master_gain_(std::pow(10.0, options.headroom_db / 20.0) *
                   std::clamp(options.volume, 0.0, 1.0)),
      ramp_len_(std::max(1, static_cast<int>(std::lround(
                                options.smoothing_ms * 1e-3 * spec.sample_rate)))),
      curve_(options.phon, 1.0, MidiToHz(spec.param_min()),
             MidiToHz(spec.param_max())),
      noise_(options.noise_seed) {
  spec_.Validate();
  if (options.headroom_db > 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "headroom must be <= 0 dBFS");
  }
  if (spec_.kind == SonificationKind::kReverb) {
    reverb_cal_ = &ReverbCalibration::ForSampleRate(spec_.sample_rate);
    // Both endpoints must be reachable before anything is rendered.
    reverb_cal_->Calibrate(spec_.param_min());
    FreeverbConfig cfg = reverb_cal_->Calibrate(spec_.param_max());
    cfg.wet_mix = options_.reverb_wet_mix;
    reverb_ = std::make_unique<Freeverb>(cfg);
  }
}

void Renderer::SetTarget(double param, double pan) {
  param = std::clamp(param, spec_.param_min(), spec_.param_max());
  pan = std::clamp(pan, 0.0, 1.0);
  if (!active_) {
    active_ = true;
    param_ = param_target_ = param;
    pan_ = pan_target_ = pan;
    ramp_left_ = 0;
    return;
  }
  param_target_ = param;
  pan_target_ = pan;
  ramp_left_ = ramp_len_;
  param_step_ = (param_target_ - param_) / ramp_len_;
  pan_step_ = (pan_target_ - pan_) / ramp_len_;
}

void Renderer::UpdateReverb() {
  if (reverb_countdown_-- > 0 && reverb_rt_applied_ >= 0.0) return;
  reverb_countdown_ = kReverbUpdateInterval;
  if (param_ == reverb_rt_applied_) return;
  FreeverbConfig cfg = reverb_cal_->Calibrate(param_);
  cfg.wet_mix = options_.reverb_wet_mix;
  reverb_->SetConfig(cfg);
  reverb_rt_applied_ = param_;
}

double Renderer::NextMono() {
  double carrier_hz = spec_.carrier_hz;
  double amplitude = 1.0;
  if (spec_.kind == SonificationKind::kFreq) {
    carrier_hz = MidiToHz(param_, spec_.quantize_semitones);
    bool clamped = false;
    amplitude = curve_.Gain(carrier_hz, &clamped);
    diag_.frequency_clamped = diag_.frequency_clamped || clamped;
  }
  const double tone = std::sin(kTwoPi * carrier_phase_);
  carrier_phase_ += carrier_hz * inv_rate_;
  carrier_phase_ -= std::floor(carrier_phase_);

  switch (spec_.kind) {
    case SonificationKind::kFreq:
      return amplitude * tone;
    case SonificationKind::kAmp:
      return std::pow(10.0, param_ / 20.0) * tone;
    case SonificationKind::kSnr: {
      const auto [tone_w, noise_w] = SnrWeights(param_);
      return tone_w * tone + noise_w * UniformNoise(noise_);
    }
    case SonificationKind::kBrr:
    case SonificationKind::kReverb: {
      const double rate = spec_.kind == SonificationKind::kBrr
                              ? param_
                              : options_.reverb_beep_rate_hz;
      if (pending_onset_) {
        pending_onset_ = false;
        since_onset_ = 0.0;
        ++diag_.onsets;
      }
      double env = std::exp(-39.0 * since_onset_);
      if (options_.beep_gate_s > 0.0 && since_onset_ >= options_.beep_gate_s) {
        env = 0.0;
      }
      since_onset_ += inv_rate_;
      beep_phase_ += rate * inv_rate_;
      if (beep_phase_ >= 1.0) {
        beep_phase_ -= std::floor(beep_phase_);
        pending_onset_ = true;
      }
      const double beep = env * tone;
      if (spec_.kind == SonificationKind::kBrr) return beep;
      UpdateReverb();
      return reverb_->Process(static_cast<float>(beep));
    }
  }
  return 0.0;
}

void Renderer::Render(std::span<float> left, std::span<float> right) {
  const std::size_t n = std::min(left.size(), right.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!active_) {
      left[i] = right[i] = 0.0f;
      continue;
    }
    if (ramp_left_ > 0) {
      if (--ramp_left_ == 0) {
        param_ = param_target_;
        pan_ = pan_target_;
      } else {
        param_ += param_step_;
        pan_ += pan_step_;
      }
    }
    const double mono = NextMono() * master_gain_;
    double l = mono * (1.0 - pan_);
    double r = mono * pan_;
    if (std::abs(l) > 1.0 || std::abs(r) > 1.0) {
      ++diag_.clipped_samples;
      l = std::clamp(l, -1.0, 1.0);
      r = std::clamp(r, -1.0, 1.0);
    }
    left[i] = static_cast<float>(l);
    right[i] = static_cast<float>(r);
  }
}

AudioBlock Synthesize(const SonificationSpec& spec,
                      std::span<const RenderFrame> frames, double duration_s,
                      const SynthOptions& options,
                      RenderDiagnostics* diagnostics) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].kind != spec.kind) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frame kind does not match the sonification");
    }
    if (!std::isfinite(frames[i].timestamp) || !std::isfinite(frames[i].param) ||
        (i > 0 && frames[i].timestamp < frames[i - 1].timestamp)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frames must be finite and ordered by timestamp");
    }
  }
  Renderer renderer(spec, options);
  const auto total = static_cast<std::size_t>(std::llround(duration_s * spec.sample_rate));
  AudioBlock block(total, spec.sample_rate);
  std::size_t pos = 0;
  std::size_t next = 0;
  while (pos < total) {
    // Apply every frame due at or before the current sample.
    while (next < frames.size() &&
           std::llround(frames[next].timestamp * spec.sample_rate) <=
               static_cast<long long>(pos)) {
      renderer.SetTarget(frames[next].param, frames[next].pan);
      ++next;
    }
    std::size_t end = total;
    if (next < frames.size()) {
      const long long due = std::llround(frames[next].timestamp * spec.sample_rate);
      end = std::min<std::size_t>(total, static_cast<std::size_t>(std::max<long long>(due, pos + 1)));
    }
    renderer.Render(std::span(block.left).subspan(pos, end - pos),
                    std::span(block.right).subspan(pos, end - pos));
    pos = end;
  }
  if (diagnostics != nullptr) *diagnostics = renderer.diagnostics();
  return block;
}

void FrameMailbox::Publish(const RenderFrame& frame) {
  slots_[back_] = frame;
  back_ = middle_.exchange(back_ | kDirty, std::memory_order_acq_rel) & ~kDirty;
}

std::optional<RenderFrame> FrameMailbox::Consume() {
  if ((middle_.load(std::memory_order_acquire) & kDirty) == 0) return std::nullopt;
  front_ = middle_.exchange(front_, std::memory_order_acq_rel) & ~kDirty;
  return slots_[front_];
}

StreamingEngine::StreamingEngine(const SonificationSpec& spec,
                                 const SynthOptions& options)
    : renderer_(spec, options) {}

void StreamingEngine::Process(std::span<float> left, std::span<float> right) {
  if (auto frame = mailbox_.Consume()) {
    if (frame->kind == renderer_.spec().kind) {
      renderer_.SetTarget(frame->param, frame->pan);
    }
  }
  renderer_.Render(left, right);
}

}  // namespace sonify
