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

#include "equal_loudness.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "error.hpp"

namespace sonify {

namespace {

constexpr std::array<double, 29> kFreq = {
    20,   25,   31.5, 40,   50,   63,   80,    100,   125,  160,
    200,  250,  315,  400,  500,  630,  800,   1000,  1250, 1600,
    2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500};

// Exponent of loudness perception.
constexpr std::array<double, 29> kAf = {
    0.532, 0.506, 0.480, 0.455, 0.432, 0.409, 0.387, 0.367, 0.349, 0.330,
    0.315, 0.301, 0.288, 0.276, 0.267, 0.259, 0.253, 0.250, 0.246, 0.244,
    0.243, 0.243, 0.243, 0.242, 0.242, 0.245, 0.254, 0.271, 0.301};

// Magnitude of the linear transfer function normalized at 1 kHz.
constexpr std::array<double, 29> kLu = {
    -31.6, -27.2, -23.0, -19.1, -15.9, -13.0, -10.3, -8.1, -6.2, -4.5,
    -3.1,  -2.0,  -1.1,  -0.4,  0.0,   0.3,   0.5,   0.0,  -2.7, -4.1,
    -1.0,  1.7,   2.5,   1.2,   -2.1,  -7.1,  -11.2, -10.7, -3.1};

// Threshold of hearing.
constexpr std::array<double, 29> kTf = {
    78.5, 68.7, 59.5, 51.1, 44.0, 37.5, 31.5, 26.5, 22.1, 17.9,
    14.4, 11.4, 8.6,  6.2,  4.4,  3.0,  2.2,  2.4,  3.5,  1.7,
    -1.3, -4.2, -6.0, -5.4, -1.5, 6.0,  12.6, 13.9, 12.3};

constexpr std::size_t kRefIndex = 17;  // 1000 Hz

}  // namespace

std::span<const double> Iso226Frequencies() { return kFreq; }

double Iso226Spl(double phon, std::size_t index) {
  if (index >= kFreq.size()) {
    throw Error(ErrorCode::kOutOfRange, "ISO 226 frequency index out of range");
  }
  const double af = kAf[index];
  const double lu = kLu[index];
  const double tf = kTf[index];
  const double a = 4.47e-3 * (std::pow(10.0, 0.025 * phon) - 1.15) +
                   std::pow(0.4 * std::pow(10.0, (tf + lu) / 10.0 - 9.0), af);
  return 10.0 / af * std::log10(a) - lu + 94.0;
}

EqualLoudnessCurve::EqualLoudnessCurve(double phon, double headroom,
                                       double gain_low_hz, double gain_high_hz)
    : phon_(phon), headroom_(headroom) {
  if (!(phon >= 20.0 && phon <= 90.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "equal-loudness contours are defined for 20..90 phon");
  }
  if (!(headroom > 0.0 && headroom <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "headroom must lie in (0, 1]");
  }
  const double ref = Iso226Spl(phon, kRefIndex);
  anchors_.reserve(kFreq.size());
  for (std::size_t i = 0; i < kFreq.size(); ++i) {
    anchors_.push_back({kFreq[i], Iso226Spl(phon, i) - ref});
  }
  anchors_[kRefIndex].relative_db = 0.0;

  // The interpolant is piecewise linear, so its maximum over an interval
  // is attained at an endpoint or an interior anchor.
  max_level_db_ = std::max(RelativeLevelDb(gain_low_hz),
                           RelativeLevelDb(gain_high_hz));
  for (const Anchor& a : anchors_) {
    if (a.hz > gain_low_hz && a.hz < gain_high_hz) {
      max_level_db_ = std::max(max_level_db_, a.relative_db);
    }
  }
}

double EqualLoudnessCurve::RelativeLevelDb(double hz, bool* clamped) const {
  if (clamped != nullptr) *clamped = false;
  if (!(hz > anchors_.front().hz)) {
    if (clamped != nullptr) *clamped = hz < anchors_.front().hz || !std::isfinite(hz);
    return anchors_.front().relative_db;
  }
  if (!(hz < anchors_.back().hz)) {
    if (clamped != nullptr) *clamped = hz > anchors_.back().hz;
    return anchors_.back().relative_db;
  }
  const auto upper = std::upper_bound(
      anchors_.begin(), anchors_.end(), hz,
      [](double f, const Anchor& a) { return f < a.hz; });
  const Anchor& hi = *upper;
  const Anchor& lo = *(upper - 1);
  if (hz == lo.hz) return lo.relative_db;
  const double w = std::log(hz / lo.hz) / std::log(hi.hz / lo.hz);
  return std::lerp(lo.relative_db, hi.relative_db, w);
}

double EqualLoudnessCurve::Gain(double hz, bool* clamped) const {
  const double level = RelativeLevelDb(hz, clamped);
  return headroom_ * std::pow(10.0, (level - max_level_db_) / 20.0);
}

}  // namespace sonify
