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

#include <cstddef>
#include <utility>
#include <vector>

namespace sonify {

// Stereo PCM in [-1, 1].
struct AudioBlock {
  std::vector<float> left;
  std::vector<float> right;
  int sample_rate = 44100;

  AudioBlock() = default;
  AudioBlock(std::size_t frames, int rate)
      : left(frames, 0.0f), right(frames, 0.0f), sample_rate(rate) {}

  std::size_t frames() const { return left.size(); }
  double duration_s() const {
    return static_cast<double>(left.size()) / sample_rate;
  }

  static AudioBlock Mono(std::vector<float> samples, int rate) {
    AudioBlock block;
    block.right = samples;
    block.left = std::move(samples);
    block.sample_rate = rate;
    return block;
  }
};

// Largest absolute sample over both channels.
float PeakAbs(const AudioBlock& block);

// Appends `tail` to `head` after `gap_s` seconds of silence. Sample rates
// must match.
AudioBlock Concatenate(const AudioBlock& head, const AudioBlock& tail,
                       double gap_s);

}  // namespace sonify
