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

#include "audio.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace sonify {

float PeakAbs(const AudioBlock& block) {
  float peak = 0.0f;
  for (float s : block.left) peak = std::max(peak, std::abs(s));
  for (float s : block.right) peak = std::max(peak, std::abs(s));
  return peak;
}

AudioBlock Concatenate(const AudioBlock& head, const AudioBlock& tail,
                       double gap_s) {
  if (head.sample_rate != tail.sample_rate) {
    throw Error(ErrorCode::kInvalidArgument, "sample rates differ");
  }
  const auto gap = static_cast<std::size_t>(
      std::llround(std::max(0.0, gap_s) * head.sample_rate));
  AudioBlock out(head.frames() + gap + tail.frames(), head.sample_rate);
  std::copy(head.left.begin(), head.left.end(), out.left.begin());
  std::copy(head.right.begin(), head.right.end(), out.right.begin());
  const std::size_t offset = head.frames() + gap;
  std::copy(tail.left.begin(), tail.left.end(), out.left.begin() + offset);
  std::copy(tail.right.begin(), tail.right.end(), out.right.begin() + offset);
  return out;
}

}  // namespace sonify
