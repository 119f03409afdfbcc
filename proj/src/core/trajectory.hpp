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

#include <istream>
#include <optional>
#include <vector>

#include "audio.hpp"
#include "mapping.hpp"
#include "synth.hpp"

namespace sonify {

// One sample of a depth trajectory; azimuth is optional per line.
struct TrajectoryPoint {
  double t_s = 0.0;
  double depth_m = 0.0;
  std::optional<double> azimuth_deg;
};

// Whitespace- or comma-separated "t_s depth_m [azimuth_deg]" lines; blank
// lines and '#' comments are skipped. Throws Error(kParse) on bad lines,
// Error(kInvalidArgument) when empty or when time goes backwards.
std::vector<TrajectoryPoint> ParseTrajectory(std::istream& in);
std::vector<TrajectoryPoint> ReadTrajectory(const std::string& path);

// duration_s <= 0 renders up to the last point's time.
AudioBlock RenderTrajectory(const SonificationSpec& spec,
                            const std::vector<TrajectoryPoint>& points, double duration_s,
                            const SynthOptions& options = {},
                            RenderDiagnostics* diagnostics = nullptr);

}  // namespace sonify
