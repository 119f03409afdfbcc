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

#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "error.hpp"

namespace sonify {

namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint32_t GetU32(const std::vector<std::uint8_t>& in, std::size_t at) {
  return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8) |
         (static_cast<std::uint32_t>(in[at + 2]) << 16) |
         (static_cast<std::uint32_t>(in[at + 3]) << 24);
}
std::uint16_t GetU16(const std::vector<std::uint8_t>& in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

std::int16_t ToPcm(float s) {
  const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
  return static_cast<std::int16_t>(std::lround(clamped * 32767.0));
}

}  // namespace

std::vector<std::uint8_t> EncodeWav(const AudioBlock& block) {
  const auto frames = static_cast<std::uint32_t>(block.frames());
  const std::uint32_t data_bytes = frames * 4;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, 1);  // PCM
  PutU16(out, 2);
  PutU32(out, static_cast<std::uint32_t>(block.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(block.sample_rate) * 4);
  PutU16(out, 4);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (std::size_t i = 0; i < block.frames(); ++i) {
    PutU16(out, static_cast<std::uint16_t>(ToPcm(block.left[i])));
    PutU16(out, static_cast<std::uint16_t>(ToPcm(block.right[i])));
  }
  return out;
}

void WriteWav(const std::string& path, const AudioBlock& block) {
  const std::vector<std::uint8_t> bytes = EncodeWav(block);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

AudioBlock DecodeWav(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kParse, "not a RIFF/WAVE file");
  }
  int channels = 0, bits = 0, rate = 0;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::uint32_t size = GetU32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (body + size > bytes.size()) throw Error(ErrorCode::kParse, "truncated chunk");
    if (std::memcmp(bytes.data() + at, "fmt ", 4) == 0) {
      if (GetU16(bytes, body) != 1) throw Error(ErrorCode::kParse, "only PCM supported");
      channels = GetU16(bytes, body + 2);
      rate = static_cast<int>(GetU32(bytes, body + 4));
      bits = GetU16(bytes, body + 14);
    } else if (std::memcmp(bytes.data() + at, "data", 4) == 0) {
      if (bits != 16 || (channels != 1 && channels != 2)) {
        throw Error(ErrorCode::kParse, "expected 16-bit mono or stereo PCM");
      }
      const std::size_t frames = size / (2u * channels);
      AudioBlock block(frames, rate);
      for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t p = body + i * 2u * channels;
        const auto l = static_cast<std::int16_t>(GetU16(bytes, p));
        const auto r = channels == 2 ? static_cast<std::int16_t>(GetU16(bytes, p + 2)) : l;
        block.left[i] = static_cast<float>(l / 32767.0);
        block.right[i] = static_cast<float>(r / 32767.0);
      }
      return block;
    }
    at = body + size + (size & 1u);
  }
  throw Error(ErrorCode::kParse, "no data chunk");
}

AudioBlock ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeWav(bytes);
}

}  // namespace sonify
