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

#include "protocol.hpp"

#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "error.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace sonify {
namespace {

SonificationSpec Spec(SonificationKind kind = SonificationKind::kAmp) {
  return SonificationSpec::Default(kind);
}

// Tracker pose that lands the box at the given depth and azimuth.
LivePosition At(double t, double depth_cm, double az_deg = 0.0) {
  GeometryConfig cfg;
  const double x = TableXForTarget(depth_cm, AzimuthDegrees{az_deg}).value_or(0.0);
  return PositionFromPose({t, x, 0.0, cfg.depth_origin_cm - cfg.box_edge_cm / 2 - depth_cm},
                          cfg);
}

template <typename T>
int Count(const std::vector<StageOutput>& out) {
  int n = 0;
  for (const auto& o : out) n += std::holds_alternative<T>(o);
  return n;
}

template <typename T>
const T* Find(const std::vector<StageOutput>& out) {
  for (const auto& o : out) {
    if (const T* p = std::get_if<T>(&o)) return p;
  }
  return nullptr;
}

TEST(StageSpecTest, Plans) {
  const StageSpec s1 = StageSpec::ForStage(1);
  EXPECT_EQ(s1.learning_count(), 3);
  EXPECT_EQ(s1.positioning_count(), 15);
  EXPECT_EQ(s1.plan.size(), 18u);
  EXPECT_EQ(s1.plan[0], TaskKind::kLearning);
  EXPECT_EQ(s1.plan[6], TaskKind::kLearning);
  EXPECT_FALSE(s1.sonify_azimuth);

  const StageSpec s2 = StageSpec::ForStage(2);
  EXPECT_EQ(s2.learning_count(), 1);
  EXPECT_EQ(s2.positioning_count(), 5);
  EXPECT_TRUE(s2.sonify_azimuth);

  const StageSpec s3 = StageSpec::ForStage(3);
  EXPECT_EQ(s3.learning_count(), 0);
  EXPECT_EQ(s3.positioning_count(), 5);
  EXPECT_EQ(s3.break_minutes, 10.0);

  EXPECT_THROW(StageSpec::ForStage(4), Error);
}

TEST(TargetTest, SeededDrawIsReproducible) {
  const StageSpec s1 = StageSpec::ForStage(1);
  const double a = GenerateTarget(s1, {}, 42).target.depth.value;
  const double b = GenerateTarget(s1, {}, 42).target.depth.value;
  EXPECT_EQ(a, b);
  EXPECT_GE(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_NE(a, GenerateTarget(s1, {}, 43).target.depth.value);
  EXPECT_FALSE(GenerateTarget(s1, {}, 42).target.azimuth.has_value());
}

TEST(TargetTest, StageOneDepthIsUniform) {
  const StageSpec s1 = StageSpec::ForStage(1);
  std::mt19937_64 rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += GenerateTarget(s1, {}, rng).target.depth.value;
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(TargetTest, StageTwoTargetsStayOnTheTable) {
  const StageSpec s2 = StageSpec::ForStage(2);
  GeometryConfig geo;
  std::mt19937_64 rng(11);
  int resamples = 0;
  for (int i = 0; i < 5000; ++i) {
    const TargetDraw d = GenerateTarget(s2, geo, rng);
    ASSERT_TRUE(d.target.azimuth.has_value());
    const double az = d.target.azimuth->value;
    EXPECT_GE(az, -90.0);
    EXPECT_LE(az, 90.0);
    const double depth_cm = d.target.depth.value * 100.0;
    const auto x = TableXForTarget(depth_cm, *d.target.azimuth);
    ASSERT_TRUE(x.has_value());
    EXPECT_TRUE(InsidePolygon(geo.table, {*x, depth_cm}));
    resamples += d.resamples;
  }
  EXPECT_GT(resamples, 0);  // the default table cuts off wide angles
}

TEST(TargetTest, PolygonExcludingPositiveAzimuth) {
  // Right half of the table only: x > 0 means azimuth <= 0.
  GeometryConfig geo;
  geo.table = {{0.0, 0.0}, {60.0, 0.0}, {60.0, 100.0}, {0.0, 100.0}};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    EXPECT_LE(GenerateTarget(StageSpec::ForStage(2), geo, rng).target.azimuth->value, 0.0);
  }
}

TEST(TargetTest, TinyPolygonIsAConfigError) {
  GeometryConfig geo;
  geo.table = {{500.0, 500.0}, {501.0, 500.0}, {501.0, 501.0}};
  try {
    GenerateTarget(StageSpec::ForStage(2), geo, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(PlayTargetTest, TwoSecondsCenteredWithoutAzimuth) {
  SpatialTarget t{{0.4}, std::nullopt};
  const AudioBlock block = PlayTarget(t, Spec());
  EXPECT_EQ(block.frames(), 2u * 44100u);
  double diff = 0.0;
  for (std::size_t i = 0; i < block.frames(); ++i) {
    diff = std::max(diff, std::abs(double(block.left[i]) - block.right[i]));
  }
  EXPECT_EQ(diff, 0.0);
}

TEST(PlayTargetTest, RightOnlyAtNinetyDegrees) {
  SpatialTarget t{{0.2}, AzimuthDegrees{90.0}};
  const AudioBlock block = PlayTarget(t, Spec());
  EXPECT_EQ(block.frames(), 2u * 44100u);
  EXPECT_EQ(testing::Rms(block.left), 0.0);
  EXPECT_GT(testing::Rms(block.right), 0.01);
}

TEST(TrialRecordTest, Errors) {
  TrialRecord r;
  r.target = {{0.30}, std::nullopt};
  r.placed = SpatialTarget{{0.45}, std::nullopt};
  r.ComputeErrors();
  EXPECT_NEAR(r.abs_depth_error_cm, 15.0, 1e-9);
  EXPECT_FALSE(r.abs_azimuth_error_deg.has_value());
  EXPECT_TRUE(r.ErrorsConsistent());

  r.target = {{0.5}, AzimuthDegrees{20.0}};
  r.placed = SpatialTarget{{0.5}, AzimuthDegrees{-10.0}};
  r.ComputeErrors();
  EXPECT_EQ(r.abs_depth_error_cm, 0.0);
  EXPECT_NEAR(*r.abs_azimuth_error_deg, 30.0, 1e-12);

  r.abs_depth_error_cm = 3.0;
  EXPECT_FALSE(r.ErrorsConsistent());
}

class RunnerTest : public ::testing::Test {
 protected:
  StageRunner Make(int stage, double break_minutes = 0.0) {
    StageSpec s = StageSpec::ForStage(stage, break_minutes);
    return StageRunner(s, Spec(), GeometryConfig{}, 99, 0.0);
  }
};

TEST_F(RunnerTest, LearningCoverage) {
  StageRunner r = Make(1);
  auto out = r.Start();
  ASSERT_NE(Find<LearningStarted>(out), nullptr);
  double t = 0.0;
  for (int i = 0; i <= 100; ++i) {
    t = i * 0.05;
    out = r.Handle(PoseEvent{At(t, i * 0.999)});
    EXPECT_EQ(Count<LiveFrame>(out), 1);
  }
  out = r.Handle(EndLearningEvent{t + 1.0});
  const LearningDone* done = Find<LearningDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_EQ(done->record.occupied_bins(), kCoverageBins);
  EXPECT_NEAR(done->record.duration_s, t + 1.0, 1e-12);
  EXPECT_NE(Find<PlayTargetRequest>(out), nullptr);  // first positioning task
}

TEST_F(RunnerTest, ImmediateAndStationaryLearning) {
  StageRunner r = Make(1);
  r.Start();
  auto out = r.Handle(EndLearningEvent{0.0});
  const LearningDone* done = Find<LearningDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_EQ(done->record.duration_s, 0.0);
  EXPECT_EQ(done->record.occupied_bins(), 0);

  StageRunner s = Make(2);
  s.Start();
  for (int i = 0; i < 50; ++i) s.Handle(PoseEvent{At(i * 0.03, 42.0)});
  done = nullptr;
  out = s.Handle(EndLearningEvent{2.0});
  done = Find<LearningDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_EQ(done->record.occupied_bins(), 1);
  EXPECT_EQ(done->record.coverage[4], 50);
}

TEST_F(RunnerTest, TrackingLossPausesLearning) {
  StageRunner r = Make(1);
  r.Start();
  r.Handle(PoseEvent{At(0.0, 50.0)});
  EXPECT_EQ(Count<TrackingPaused>(r.Handle(TickEvent{4.0})), 0);
  EXPECT_EQ(Count<TrackingPaused>(r.Handle(TickEvent{5.5})), 1);
  EXPECT_EQ(Count<TrackingPaused>(r.Handle(TickEvent{6.0})), 0);
  EXPECT_EQ(Count<TrackingResumed>(r.Handle(PoseEvent{At(6.5, 50.0)})), 1);
  const auto out = r.Handle(EndLearningEvent{7.0});
  EXPECT_EQ(Find<LearningDone>(out)->record.pauses, 1);
}

TEST_F(RunnerTest, PositioningErrorsAndNoFeedback) {
  StageRunner r = Make(3);
  auto out = r.Start();
  const PlayTargetRequest* play = Find<PlayTargetRequest>(out);
  ASSERT_NE(play, nullptr);
  EXPECT_TRUE(play->conceal);
  EXPECT_EQ(play->duration_s, 2.0);
  const double target_cm = play->target.depth.value * 100.0;

  r.Handle(PoseEvent{At(1.0, target_cm + 7.5)});
  out = r.Handle(ConfirmEvent{3.0});
  const TrialDone* done = Find<TrialDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_NEAR(done->record.abs_depth_error_cm, 7.5, 1e-9);
  EXPECT_NEAR(done->record.response_time_s, 1.0, 1e-12);
  EXPECT_TRUE(done->record.ErrorsConsistent());
  // The participant only ever gets the next target.
  for (const auto& o : out) {
    EXPECT_TRUE(std::holds_alternative<TrialDone>(o) ||
                std::holds_alternative<PlayTargetRequest>(o));
  }
}

TEST_F(RunnerTest, AzimuthStageRecordsAngleError) {
  StageRunner r = Make(2);
  r.Start();
  auto out = r.Handle(EndLearningEvent{0.0});
  const PlayTargetRequest* play = Find<PlayTargetRequest>(out);
  ASSERT_NE(play, nullptr);
  ASSERT_TRUE(play->target.azimuth.has_value());
  const double az = play->target.azimuth->value;
  const double placed_az = az > 0 ? az - 30.0 : az + 30.0;
  r.Handle(PoseEvent{At(2.5, 40.0, placed_az)});
  out = r.Handle(ConfirmEvent{2.6});
  const TrialDone* done = Find<TrialDone>(out);
  ASSERT_NE(done, nullptr);
  ASSERT_TRUE(done->record.abs_azimuth_error_deg.has_value());
  EXPECT_NEAR(*done->record.abs_azimuth_error_deg, 30.0, 1e-9);
}

TEST_F(RunnerTest, EarlyConfirmReplaysOnce) {
  StageRunner r = Make(3);
  r.Start();
  r.Handle(PoseEvent{At(0.2, 50.0)});
  auto out = r.Handle(ConfirmEvent{0.5});
  const ConfirmRejected* rej = Find<ConfirmRejected>(out);
  ASSERT_NE(rej, nullptr);
  EXPECT_TRUE(rej->replayed);
  EXPECT_EQ(Count<PlayTargetRequest>(out), 1);
  EXPECT_DOUBLE_EQ(r.playback_end_s(), 2.5);

  out = r.Handle(ConfirmEvent{1.0});
  rej = Find<ConfirmRejected>(out);
  ASSERT_NE(rej, nullptr);
  EXPECT_FALSE(rej->replayed);
  EXPECT_EQ(Count<PlayTargetRequest>(out), 0);

  out = r.Handle(ConfirmEvent{2.6});
  const TrialDone* done = Find<TrialDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_EQ(done->record.replays, 1);
}

TEST_F(RunnerTest, BreakDelaysStageThree) {
  StageRunner r = Make(3, 0.5);
  auto out = r.Start();
  const BreakStarted* b = Find<BreakStarted>(out);
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->until_s, 30.0);
  EXPECT_EQ(Count<PlayTargetRequest>(r.Handle(TickEvent{29.9})), 0);
  EXPECT_EQ(Count<PlayTargetRequest>(r.Handle(TickEvent{30.0})), 1);
}

TEST_F(RunnerTest, Cardinalities) {
  for (int stage : {1, 2, 3}) {
    StageRunner r = Make(stage);
    std::vector<StageOutput> all = r.Start();
    double t = 0.0;
    while (!r.finished()) {
      std::vector<StageOutput> out;
      if (r.state() == StageRunner::State::kLearning) {
        r.Handle(PoseEvent{At(t, 30.0)});
        out = r.Handle(EndLearningEvent{t += 1.0});
      } else {
        r.Handle(PoseEvent{At(t += 2.5, 60.0)});
        out = r.Handle(ConfirmEvent{t += 0.5});
      }
      all.insert(all.end(), out.begin(), out.end());
    }
    const StageSpec spec = StageSpec::ForStage(stage);
    EXPECT_EQ(Count<LearningDone>(all), spec.learning_count()) << stage;
    EXPECT_EQ(Count<TrialDone>(all), spec.positioning_count()) << stage;
    const StageDone* end = Find<StageDone>(all);
    ASSERT_NE(end, nullptr);
    EXPECT_TRUE(end->record.complete);
    EXPECT_EQ(r.state(), StageRunner::State::kDone);
  }
}

TEST_F(RunnerTest, SeedsReplayTargets) {
  auto targets = [this] {
    StageRunner r = Make(3);
    std::vector<double> depths;
    auto out = r.Start();
    double t = 0.0;
    while (!r.finished()) {
      for (const auto& o : out) {
        if (auto* p = std::get_if<PlayTargetRequest>(&o)) depths.push_back(p->target.depth.value);
      }
      r.Handle(PoseEvent{At(t += 2.5, 60.0)});
      out = r.Handle(ConfirmEvent{t += 0.5});
    }
    return depths;
  };
  const auto a = targets();
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(a, targets());
  EXPECT_EQ(std::set<double>(a.begin(), a.end()).size(), a.size());
}

TEST_F(RunnerTest, AbortMidTrialFlagsIncomplete) {
  StageRunner r = Make(3);
  r.Start();
  auto out = r.Handle(AbortEvent{1.0});
  const TrialDone* done = Find<TrialDone>(out);
  ASSERT_NE(done, nullptr);
  EXPECT_TRUE(done->record.aborted);
  EXPECT_FALSE(done->record.placed.has_value());
  const StageDone* end = Find<StageDone>(out);
  ASSERT_NE(end, nullptr);
  EXPECT_FALSE(end->record.complete);
  EXPECT_EQ(end->record.positioning_count, 0);
  EXPECT_EQ(r.state(), StageRunner::State::kAborted);
  EXPECT_TRUE(r.Handle(ConfirmEvent{5.0}).empty());
}

TEST(EventQueueTest, PreservesOrderAcrossProducers) {
  EventQueue<int> q;
  std::thread a([&] { for (int i = 0; i < 1000; ++i) q.Push(i); });
  std::thread b([&] { for (int i = 0; i < 1000; ++i) q.Push(10000 + i); });
  int last_a = -1, last_b = 9999, got = 0;
  while (got < 2000) {
    auto v = q.PopFor(std::chrono::milliseconds(500));
    ASSERT_TRUE(v.has_value());
    if (*v < 10000) {
      EXPECT_EQ(*v, last_a + 1);
      last_a = *v;
    } else {
      EXPECT_EQ(*v, last_b + 1);
      last_b = *v;
    }
    ++got;
  }
  a.join();
  b.join();
  EXPECT_FALSE(q.TryPop().has_value());
}

}  // namespace
}  // namespace sonify
