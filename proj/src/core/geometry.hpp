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
#include <istream>
#include <optional>
#include <string_view>
#include <vector>

#include "mapping.hpp"

namespace sonify {

// Marker position reported by the tracker, camera frame, centimeters.
// X points to the participant's left, Z towards the participant.
struct MarkerPose {
  double t_s = 0.0;
  double x_v = 0.0;
  double y_v = 0.0;
  double z_v = 0.0;
};

struct BoxPosition {
  double x_b = 0.0;
  double y_b = 0.0;
  double z_b = 0.0;
};

// Point on the table in (x, depth) centimeters.
struct TablePoint {
  double x_cm = 0.0;
  double depth_cm = 0.0;
};

struct GeometryConfig {
  double box_edge_cm = 28.0;
  double depth_origin_cm = 125.0;
  // Region targets may occupy, counter-clockwise or clockwise. Default:
  // 120 cm wide, 100 cm deep, centered on the participant.
  std::vector<TablePoint> table = {{-60.0, 0.0}, {60.0, 0.0}, {60.0, 100.0}, {-60.0, 100.0}};

  void Validate() const;
};

// Depth and, when encoded, azimuth of a target or a placement.
struct SpatialTarget {
  DepthMeters depth;
  std::optional<AzimuthDegrees> azimuth;
};

BoxPosition PoseToBox(const MarkerPose& pose, const GeometryConfig& cfg);

// Depth in centimeters from the origin edge; negative behind it.
double BoxToDepthCm(const BoxPosition& box, const GeometryConfig& cfg);

// Angle from the depth axis, positive towards the participant's right.
// At zero depth the sign of x decides between -90 and +90; x = 0 gives 0.
AzimuthDegrees BoxToAzimuth(const BoxPosition& box, double depth_cm);

// Inverse of the azimuth relation: the x coordinate of a target at the
// given depth and azimuth. Undefined (returns nullopt) at |az| = 90 with
// nonzero depth.
std::optional<double> TableXForTarget(double depth_cm, AzimuthDegrees az);

bool InsidePolygon(const std::vector<TablePoint>& polygon, TablePoint p);

// Position derived from one tracker record.
struct LivePosition {
  double t_s = 0.0;
  double x_cm = 0.0;
  double depth_cm = 0.0;          // raw, may be negative or beyond 100
  DepthMeters depth;              // clamped to [0, 1] m for sonification
  AzimuthDegrees azimuth;
  bool behind_origin = false;     // raw depth < 0
  bool tracking_lost = false;     // no fresh pose within the timeout
};

LivePosition PositionFromPose(const MarkerPose& pose, const GeometryConfig& cfg);

// Parses "t_s x_v_cm y_v_cm z_v_cm". Returns nullopt on anything else,
// including non-finite values.
std::optional<MarkerPose> ParsePoseRecord(std::string_view line);

// Turns a tracker record stream into live positions. A gap longer than the
// timeout freezes the last position and raises tracking_lost; malformed
// records are skipped and counted.
class PoseStream {
 public:
  explicit PoseStream(GeometryConfig cfg = {}, double stale_timeout_s = 0.2);

  // One text record. Blank lines and '#' comments are ignored silently.
  std::optional<LivePosition> Feed(std::string_view line);
  std::optional<LivePosition> Feed(const MarkerPose& pose);

  // Last position as seen at time `now_s`; tracking_lost is set once the
  // last pose is older than the timeout. nullopt before the first pose.
  std::optional<LivePosition> Poll(double now_s);

  std::uint64_t malformed() const { return malformed_; }
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t lost_events() const { return lost_events_; }
  const GeometryConfig& config() const { return cfg_; }

 private:
  GeometryConfig cfg_;
  double timeout_s_;
  std::optional<LivePosition> last_;
  bool lost_ = false;
  std::uint64_t malformed_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t lost_events_ = 0;
};

// Convenience for files: runs every line through a PoseStream.
std::vector<LivePosition> ReadPoseStream(std::istream& in, PoseStream& stream);

}  // namespace sonify
