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

#include "geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace sonify {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool ParseDouble(std::string_view token, double* out) {
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, *out);
  return result.ec == std::errc() && result.ptr == end && std::isfinite(*out);
}

}  // namespace

void GeometryConfig::Validate() const {
  if (!(box_edge_cm >= 0.0) || !std::isfinite(box_edge_cm)) {
    throw Error(ErrorCode::kInvalidArgument, "box edge must be non-negative");
  }
  if (!(depth_origin_cm > 0.0) || !std::isfinite(depth_origin_cm)) {
    throw Error(ErrorCode::kInvalidArgument, "depth origin must be positive");
  }
  if (table.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "table polygon needs at least 3 vertices");
  }
}

BoxPosition PoseToBox(const MarkerPose& pose, const GeometryConfig& cfg) {
  return {pose.x_v, pose.y_v, pose.z_v + cfg.box_edge_cm / 2.0};
}

double BoxToDepthCm(const BoxPosition& box, const GeometryConfig& cfg) {
  return cfg.depth_origin_cm - box.z_b;
}

AzimuthDegrees BoxToAzimuth(const BoxPosition& box, double depth_cm) {
  if (depth_cm == 0.0) {
    if (box.x_b > 0.0) return {-90.0};
    if (box.x_b < 0.0) return {90.0};
    return {0.0};
  }
  return {std::atan(-box.x_b / depth_cm) * kRadToDeg};
}

std::optional<double> TableXForTarget(double depth_cm, AzimuthDegrees az) {
  if (std::abs(az.value) >= 90.0) {
    if (depth_cm != 0.0) return std::nullopt;
    return 0.0;
  }
  return -depth_cm * std::tan(az.value / kRadToDeg);
}

bool InsidePolygon(const std::vector<TablePoint>& polygon, TablePoint p) {
  // Even-odd rule; points on an edge count as inside.
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const TablePoint& a = polygon[i];
    const TablePoint& b = polygon[j];
    const double cross = (b.x_cm - a.x_cm) * (p.depth_cm - a.depth_cm) -
                         (b.depth_cm - a.depth_cm) * (p.x_cm - a.x_cm);
    if (cross == 0.0 && p.x_cm >= std::min(a.x_cm, b.x_cm) &&
        p.x_cm <= std::max(a.x_cm, b.x_cm) &&
        p.depth_cm >= std::min(a.depth_cm, b.depth_cm) &&
        p.depth_cm <= std::max(a.depth_cm, b.depth_cm)) {
      return true;
    }
    if ((a.depth_cm > p.depth_cm) != (b.depth_cm > p.depth_cm)) {
      const double x_cross = a.x_cm + (p.depth_cm - a.depth_cm) *
                                          (b.x_cm - a.x_cm) /
                                          (b.depth_cm - a.depth_cm);
      if (p.x_cm < x_cross) inside = !inside;
    }
  }
  return inside;
}

LivePosition PositionFromPose(const MarkerPose& pose, const GeometryConfig& cfg) {
  const BoxPosition box = PoseToBox(pose, cfg);
  LivePosition pos;
  pos.t_s = pose.t_s;
  pos.x_cm = box.x_b;
  pos.depth_cm = BoxToDepthCm(box, cfg);
  pos.behind_origin = pos.depth_cm < 0.0;
  pos.depth = {std::clamp(pos.depth_cm / 100.0, 0.0, 1.0)};
  pos.azimuth = BoxToAzimuth(box, pos.depth_cm);
  return pos;
}

std::optional<MarkerPose> ParsePoseRecord(std::string_view line) {
  double values[4];
  int count = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (count == 4 || !ParseDouble(line.substr(i, j - i), &values[count])) {
      return std::nullopt;
    }
    ++count;
    i = j;
  }
  if (count != 4) return std::nullopt;
  return MarkerPose{values[0], values[1], values[2], values[3]};
}

PoseStream::PoseStream(GeometryConfig cfg, double stale_timeout_s)
    : cfg_(std::move(cfg)), timeout_s_(stale_timeout_s) {
  cfg_.Validate();
}

std::optional<LivePosition> PoseStream::Feed(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  if (first == std::string_view::npos || line[first] == '#') return std::nullopt;
  const auto pose = ParsePoseRecord(line);
  if (!pose) {
    ++malformed_;
    return std::nullopt;
  }
  return Feed(*pose);
}

std::optional<LivePosition> PoseStream::Feed(const MarkerPose& pose) {
  if (!std::isfinite(pose.t_s) || !std::isfinite(pose.x_v) ||
      !std::isfinite(pose.y_v) || !std::isfinite(pose.z_v) ||
      (last_ && pose.t_s < last_->t_s)) {
    ++malformed_;
    return std::nullopt;
  }
  LivePosition pos = PositionFromPose(pose, cfg_);
  // A record arriving after a long gap reports the loss it ends.
  if (last_ && pose.t_s - last_->t_s > timeout_s_) {
    pos.tracking_lost = true;
    if (!lost_) ++lost_events_;
  }
  lost_ = false;
  ++accepted_;
  last_ = pos;
  last_->tracking_lost = false;
  return pos;
}

std::optional<LivePosition> PoseStream::Poll(double now_s) {
  if (!last_) return std::nullopt;
  LivePosition pos = *last_;
  if (now_s - last_->t_s > timeout_s_) {
    pos.tracking_lost = true;
    if (!lost_) {
      lost_ = true;
      ++lost_events_;
    }
  }
  return pos;
}

std::vector<LivePosition> ReadPoseStream(std::istream& in, PoseStream& stream) {
  std::vector<LivePosition> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = stream.Feed(line)) out.push_back(*pos);
  }
  return out;
}

}  // namespace sonify
