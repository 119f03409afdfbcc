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

#include "simulate.hpp"

#include <cmath>

#include "error.hpp"
#include "gtest/gtest.h"

namespace sonify {
namespace {

SessionLog Simulate(const std::string& model, std::uint64_t seed,
               std::vector<SonificationKind> kinds = {}) {
  SimulationOptions opt;
  opt.seed = seed;
  opt.model = ParticipantModel::Parse(model);
  opt.kinds = std::move(kinds);
  return SimulateSession(SessionConfig{}, opt);
}

double MeanDepthError(const std::vector<SessionLog>& logs, std::size_t* n) {
  double sum = 0.0;
  *n = 0;
  for (const auto& log : logs) {
    for (const auto& t : log.positioning()) {
      sum += t.abs_depth_error_cm;
      ++*n;
    }
  }
  return sum / static_cast<double>(*n);
}

TEST(ParticipantModelTest, Parse) {
  EXPECT_EQ(ParticipantModel::Parse("perfect").kind, ParticipantModel::Kind::kPerfect);
  EXPECT_EQ(ParticipantModel::Parse("uniform").kind, ParticipantModel::Kind::kUniform);
  const ParticipantModel g = ParticipantModel::Parse("gaussian:4.5");
  EXPECT_EQ(g.kind, ParticipantModel::Kind::kGaussian);
  EXPECT_EQ(g.sigma_cm, 4.5);
  EXPECT_EQ(g.Name(), "gaussian:4.5");
  EXPECT_THROW(ParticipantModel::Parse("psychic"), Error);
  EXPECT_THROW(ParticipantModel::Parse("gaussian:-1"), Error);
  EXPECT_THROW(ParticipantModel::Parse("gaussian:abc"), Error);
}

TEST(SimulateTest, CardinalitiesPerSonification) {
  const SessionLog log = Simulate("gaussian", 2);
  for (SonificationKind kind : kAllKinds) {
    for (auto [stage, learning, positioning] :
         {std::tuple{1, 3, 15}, std::tuple{2, 1, 5}, std::tuple{3, 0, 5}}) {
      int l = 0, p = 0;
      for (const auto& r : log.learning()) l += r.stage_id == stage && r.sonification == kind;
      for (const auto& r : log.positioning()) p += r.stage_id == stage && r.sonification == kind;
      EXPECT_EQ(l, learning) << KindName(kind) << " stage " << stage;
      EXPECT_EQ(p, positioning) << KindName(kind) << " stage " << stage;
    }
  }
}

TEST(SimulateTest, SeededReplayIsByteIdentical) {
  EXPECT_EQ(SerializeLog(Simulate("gaussian", 77)), SerializeLog(Simulate("gaussian", 77)));
  EXPECT_NE(SerializeLog(Simulate("gaussian", 77)), SerializeLog(Simulate("gaussian", 78)));
}

TEST(SimulateTest, FollowsSeededOrderByDefault) {
  const SessionLog log = Simulate("perfect", 9);
  std::vector<SonificationKind> seen;
  for (const auto& e : log.stage_ends()) {
    if (e.stage_id == 1) seen.push_back(e.sonification);
  }
  EXPECT_EQ(seen, log.header.sonification_order);
}

TEST(SimulateTest, PerfectParticipantHasZeroError) {
  const SessionLog log = Simulate("perfect", 3);
  for (const auto& t : log.positioning()) {
    EXPECT_NEAR(t.abs_depth_error_cm, 0.0, 1e-9);
    if (t.abs_azimuth_error_deg) EXPECT_NEAR(*t.abs_azimuth_error_deg, 0.0, 1e-9);
  }
  EXPECT_TRUE(VerifyLog(log).empty());
}

TEST(SimulateTest, GaussianSigmaZeroHasZeroError) {
  for (const auto& t : Simulate("gaussian:0", 3, {SonificationKind::kFreq}).positioning()) {
    EXPECT_NEAR(t.abs_depth_error_cm, 0.0, 1e-9);
  }
}

TEST(SimulateTest, GaussianMeanAbsoluteError) {
  std::vector<SessionLog> logs;
  for (std::uint64_t s = 1; s <= 80; ++s) logs.push_back(Simulate("gaussian:10", s));
  std::size_t n = 0;
  const double mean = MeanDepthError(logs, &n);
  EXPECT_GE(n, 10000u);
  EXPECT_NEAR(mean, 7.98, 1.0);
}

TEST(SimulateTest, UniformPlacementConvergesToChance) {
  std::vector<SessionLog> logs;
  for (std::uint64_t s = 1; s <= 80; ++s) logs.push_back(Simulate("uniform", s));
  std::size_t n = 0;
  const double mean = MeanDepthError(logs, &n);
  EXPECT_GE(n, 10000u);
  EXPECT_NEAR(mean, 100.0 / 3.0, 1.0);
}

TEST(SimulateTest, StageThreeAloneIsRejected) {
  SimulationOptions opt;
  opt.stages = {3};
  try {
    SimulateSession(SessionConfig{}, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kState);
  }
}

TEST(SimulateTest, PoseForTablePointLandsThere) {
  GeometryConfig geo;
  const MarkerPose p = PoseForTablePoint({-20.0, 35.0}, 1.0, geo);
  const LivePosition pos = PositionFromPose(p, geo);
  EXPECT_NEAR(pos.depth_cm, 35.0, 1e-12);
  EXPECT_NEAR(pos.x_cm, -20.0, 1e-12);
}

}  // namespace
}  // namespace sonify
