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

#include "trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace sonify {

std::vector<TrajectoryPoint> ParseTrajectory(std::istream& in) {
  std::vector<TrajectoryPoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(x)) {
        throw Error(ErrorCode::kParse, "trajectory line " + std::to_string(line_no) +
                                           ": bad number '" + tok + "'");
      }
      v.push_back(x);
    }
    if (v.empty()) continue;
    if (v.size() < 2 || v.size() > 3) {
      throw Error(ErrorCode::kParse, "trajectory line " + std::to_string(line_no) +
                                         ": expected t_s depth_m [azimuth_deg]");
    }
    TrajectoryPoint p{v[0], v[1], std::nullopt};
    if (v.size() == 3) p.azimuth_deg = v[2];
    if (!points.empty() && p.t_s < points.back().t_s) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trajectory is not sorted by time at line " + std::to_string(line_no));
    }
    points.push_back(p);
  }
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "trajectory is empty");
  return points;
}

std::vector<TrajectoryPoint> ReadTrajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trajectory " + path);
  return ParseTrajectory(in);
}

AudioBlock RenderTrajectory(const SonificationSpec& spec,
                            const std::vector<TrajectoryPoint>& points, double duration_s,
                            const SynthOptions& options, RenderDiagnostics* diagnostics) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "trajectory is empty");
  if (!(duration_s > 0.0)) duration_s = points.back().t_s;
  if (!(duration_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory spans no time; give an explicit duration");
  }
  std::vector<RenderFrame> frames;
  frames.reserve(points.size());
  for (const TrajectoryPoint& p : points) {
    std::optional<AzimuthDegrees> az;
    if (p.azimuth_deg) az = AzimuthDegrees{*p.azimuth_deg};
    frames.push_back(MakeFrame(spec, DepthMeters{p.depth_m}, az, p.t_s));
  }
  return Synthesize(spec, frames, duration_s, options, diagnostics);
}

}  // namespace sonify
