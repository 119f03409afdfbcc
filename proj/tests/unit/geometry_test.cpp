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

#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "gtest/gtest.h"

namespace sonify {
namespace {

TEST(GeometryTest, PoseToBoxExamples) {
  GeometryConfig cfg;
  BoxPosition b = PoseToBox({0.0, 10.0, 0.0, 111.0}, cfg);
  EXPECT_EQ(b.x_b, 10.0);
  EXPECT_EQ(b.y_b, 0.0);
  EXPECT_EQ(b.z_b, 125.0);
  EXPECT_EQ(PoseToBox({0.0, 0.0, 0.0, 25.0}, cfg).z_b, 39.0);

  cfg.box_edge_cm = 0.0;
  EXPECT_EQ(PoseToBox({0.0, 3.0, 4.0, 77.0}, cfg).z_b, 77.0);
}

TEST(GeometryTest, DepthExamples) {
  GeometryConfig cfg;
  EXPECT_EQ(BoxToDepthCm({0, 0, 125.0}, cfg), 0.0);
  EXPECT_EQ(BoxToDepthCm({0, 0, 25.0}, cfg), 100.0);
  EXPECT_EQ(BoxToDepthCm({0, 0, 130.0}, cfg), -5.0);
}

TEST(GeometryTest, DepthIsAffineInZWithSlopeMinusOne) {
  GeometryConfig cfg;
  const double d0 = BoxToDepthCm(PoseToBox({0, 0, 0, 0.0}, cfg), cfg);
  for (double z = -50.0; z <= 200.0; z += 7.25) {
    EXPECT_NEAR(BoxToDepthCm(PoseToBox({0, 0, 0, z}, cfg), cfg), d0 - z, 1e-12);
  }
}

TEST(GeometryTest, AzimuthExamples) {
  EXPECT_EQ(BoxToAzimuth({5.0, 0, 0}, 0.0).value, -90.0);
  EXPECT_EQ(BoxToAzimuth({-5.0, 0, 0}, 0.0).value, 90.0);
  EXPECT_EQ(BoxToAzimuth({0.0, 0, 0}, 0.0).value, 0.0);
  EXPECT_EQ(BoxToAzimuth({0.0, 0, 0}, 40.0).value, 0.0);
  EXPECT_NEAR(BoxToAzimuth({-50.0, 0, 0}, 50.0).value, 45.0, 1e-12);
}

TEST(GeometryTest, AzimuthSignFollowsCameraX) {
  for (double x = -60.0; x <= 60.0; x += 5.0) {
    for (double depth = 1.0; depth <= 100.0; depth += 9.0) {
      const double az = BoxToAzimuth({x, 0, 0}, depth).value;
      if (x < 0) EXPECT_GT(az, 0.0) << x << " " << depth;
      if (x > 0) EXPECT_LT(az, 0.0) << x << " " << depth;
      EXPECT_LE(std::abs(az), 90.0);
    }
  }
}

TEST(GeometryTest, AzimuthApproachesCaseValueAtZeroDepth) {
  for (double x : {-30.0, -0.5, 0.5, 30.0}) {
    const double limit = BoxToAzimuth({x, 0, 0}, 0.0).value;
    double prev_gap = 1e9;
    for (double depth = 1.0; depth > 1e-7; depth /= 10.0) {
      const double gap = std::abs(BoxToAzimuth({x, 0, 0}, depth).value - limit);
      EXPECT_LT(gap, prev_gap);
      prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 1e-3);
  }
}

TEST(GeometryTest, TableXInvertsAzimuth) {
  for (double az = -80.0; az <= 80.0; az += 10.0) {
    const auto x = TableXForTarget(60.0, AzimuthDegrees{az});
    ASSERT_TRUE(x.has_value());
    EXPECT_NEAR(BoxToAzimuth({*x, 0, 0}, 60.0).value, az, 1e-9);
  }
  EXPECT_FALSE(TableXForTarget(60.0, AzimuthDegrees{90.0}).has_value());
}

TEST(GeometryTest, InsidePolygonEitherWinding) {
  GeometryConfig cfg;
  auto reversed = cfg.table;
  std::reverse(reversed.begin(), reversed.end());
  for (const auto& poly : {cfg.table, reversed}) {
    EXPECT_TRUE(InsidePolygon(poly, {0.0, 50.0}));
    EXPECT_TRUE(InsidePolygon(poly, {-59.0, 99.0}));
    EXPECT_FALSE(InsidePolygon(poly, {61.0, 50.0}));
    EXPECT_FALSE(InsidePolygon(poly, {0.0, 101.0}));
  }
}

TEST(GeometryTest, PositionClampsButKeepsRawDepth) {
  GeometryConfig cfg;
  LivePosition p = PositionFromPose({1.0, 0.0, 0.0, 116.0}, cfg);  // z_b 130
  EXPECT_EQ(p.depth_cm, -5.0);
  EXPECT_TRUE(p.behind_origin);
  EXPECT_EQ(p.depth.value, 0.0);

  p = PositionFromPose({1.0, 0.0, 0.0, -20.0}, cfg);
  EXPECT_EQ(p.depth_cm, 131.0);
  EXPECT_FALSE(p.behind_origin);
  EXPECT_EQ(p.depth.value, 1.0);
}

TEST(GeometryTest, ValidateRejectsBadConfig) {
  GeometryConfig cfg;
  cfg.box_edge_cm = -1.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = {};
  cfg.depth_origin_cm = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = {};
  cfg.table.resize(2);
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(PoseRecordTest, Parse) {
  auto p = ParsePoseRecord("0.5 10 -2 111");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->t_s, 0.5);
  EXPECT_EQ(p->z_v, 111.0);
  EXPECT_FALSE(ParsePoseRecord("0.5 10 -2").has_value());
  EXPECT_FALSE(ParsePoseRecord("0.5 10 -2 nan").has_value());
  EXPECT_FALSE(ParsePoseRecord("0.5 10 -2 inf").has_value());
  EXPECT_FALSE(ParsePoseRecord("0.5 10 -2 1 9").has_value());
  EXPECT_FALSE(ParsePoseRecord("a b c d").has_value());
}

TEST(PoseStreamTest, PassesThroughAtSourceRate) {
  std::ostringstream text;
  for (int i = 0; i < 30; ++i) text << i / 30.0 << " 0 0 " << 25 + i << "\n";
  std::istringstream in(text.str());
  PoseStream stream;
  const auto out = ReadPoseStream(in, stream);
  ASSERT_EQ(out.size(), 30u);
  EXPECT_EQ(stream.malformed(), 0u);
  for (const auto& p : out) EXPECT_FALSE(p.tracking_lost);
  EXPECT_NEAR(out.back().t_s - out.front().t_s, 29.0 / 30.0, 1e-5);
}

TEST(PoseStreamTest, MalformedRecordsAreSkippedAndCounted) {
  std::istringstream in(
      "# header\n"
      "0.0 0 0 25\n"
      "\n"
      "0.1 0 0 nan\n"
      "garbage\n"
      "0.2 0 0 30\n"
      "0.15 0 0 30\n");  // time went backwards
  PoseStream stream;
  const auto out = ReadPoseStream(in, stream);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_EQ(stream.malformed(), 3u);
  EXPECT_EQ(stream.accepted(), 2u);
}

TEST(PoseStreamTest, GapRaisesTrackingLost) {
  PoseStream stream;
  ASSERT_TRUE(stream.Feed("0.0 0 0 75"));
  EXPECT_FALSE(stream.Poll(0.1)->tracking_lost);
  auto polled = stream.Poll(0.5);
  ASSERT_TRUE(polled.has_value());
  EXPECT_TRUE(polled->tracking_lost);
  EXPECT_EQ(polled->depth_cm, 36.0);  // frozen at the last value
  EXPECT_EQ(stream.lost_events(), 1u);

  auto next = stream.Feed("0.6 0 0 65");
  ASSERT_TRUE(next.has_value());
  EXPECT_TRUE(next->tracking_lost);
  EXPECT_EQ(stream.lost_events(), 1u);  // same gap
  EXPECT_FALSE(stream.Poll(0.65)->tracking_lost);
}

TEST(PoseStreamTest, PollBeforeFirstPose) {
  PoseStream stream;
  EXPECT_FALSE(stream.Poll(1.0).has_value());
}

}  // namespace
}  // namespace sonify
