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

#include <span>
#include <vector>

namespace sonify {

// Preferred third-octave frequencies for which ISO 226:2003 tabulates
// the loudness parameters (20 Hz .. 12.5 kHz).
std::span<const double> Iso226Frequencies();

// Sound pressure level (dB SPL) of a pure tone at the tabulated frequency
// `index` that is perceived at `phon` loudness, using the standard's
// closed-form contour equation.
double Iso226Spl(double phon, std::size_t index);

// Equal-loudness contour sampled at the ISO 226 anchor frequencies and
// interpolated linearly in dB over log-frequency. Levels are relative to
// the 1 kHz anchor, so the curve is 0 dB at 1 kHz by construction.
class EqualLoudnessCurve {
 public:
  struct Anchor {
    double hz;
    double relative_db;
  };

  // `headroom` is the linear gain assigned to the loudest-needed
  // frequency of [gain_low_hz, gain_high_hz]; must lie in (0, 1].
  explicit EqualLoudnessCurve(double phon = 60.0, double headroom = 1.0,
                              double gain_low_hz = 130.0,
                              double gain_high_hz = 4000.0);

  double phon() const { return phon_; }
  const std::vector<Anchor>& anchors() const { return anchors_; }

  // Level (dB) a tone at `hz` needs relative to 1 kHz to sound equally
  // loud. Outside the anchor span the nearest anchor is used and `clamped`
  // is set when non-null.
  double RelativeLevelDb(double hz, bool* clamped = nullptr) const;

  // Linear amplitude realizing RelativeLevelDb, scaled so the maximum over
  // the configured gain range equals the headroom.
  double Gain(double hz, bool* clamped = nullptr) const;

 private:
  double phon_;
  double headroom_;
  double max_level_db_ = 0.0;
  std::vector<Anchor> anchors_;
};

}  // namespace sonify
