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

#include <cstdint>
#include <string>
#include <vector>

#include "audio.hpp"

namespace sonify {

// 16-bit little-endian PCM, two channels, canonical 44-byte header.
std::vector<std::uint8_t> EncodeWav(const AudioBlock& block);
void WriteWav(const std::string& path, const AudioBlock& block);

// Reads what EncodeWav writes (16-bit PCM, mono or stereo).
AudioBlock DecodeWav(const std::vector<std::uint8_t>& bytes);
AudioBlock ReadWav(const std::string& path);

}  // namespace sonify
