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

#include "staircase.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "error.hpp"
#include "gtest/gtest.h"

namespace sonify {
namespace {

StaircaseTrial TrialWithDelta(double delta_m) {
  StaircaseTrial t;
  t.delta_m = delta_m;
  return t;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TEST(StaircaseTest, StepExamples) {
  StaircaseConfig cfg;
  cfg.initial_delta_m = 0.04;
  cfg.r_weights = {0.0, 0.0, 1.0};  // always r = +1
  Staircase a(cfg, 1);
  a.Step(Answer::kDifferent);
  EXPECT_NEAR(a.delta(), 0.032, 1e-15);

  Staircase b(cfg, 1);
  b.Step(Answer::kSame);
  EXPECT_NEAR(b.delta(), 0.05, 1e-15);
}

TEST(StaircaseTest, Correctness) {
  EXPECT_TRUE(IsCorrect(1, Answer::kDifferent));
  EXPECT_TRUE(IsCorrect(-1, Answer::kDifferent));
  EXPECT_TRUE(IsCorrect(0, Answer::kSame));
  EXPECT_FALSE(IsCorrect(0, Answer::kDifferent));
  EXPECT_FALSE(IsCorrect(1, Answer::kSame));
}

TEST(StaircaseTest, StopsAtTwentyTrials) {
  StaircaseConfig cfg;
  Staircase s(cfg, 5);
  for (int i = 0; i < 19; ++i) {
    s.Next();
    s.Step(Answer::kSame);
    ASSERT_FALSE(s.finished()) << i;
  }
  s.Next();
  s.Step(Answer::kSame);
  EXPECT_EQ(s.termination(), Termination::kMaxTrials);
  EXPECT_EQ(s.trials().size(), 20u);
  EXPECT_THROW(s.Step(Answer::kSame), Error);
  EXPECT_THROW(s.Next(), Error);
}

TEST(StaircaseTest, StopsOnStrictAlternation) {
  StaircaseConfig cfg;
  cfg.r_weights = {0.0, 0.0, 1.0};
  Staircase s(cfg, 5);
  // One wrong answer first, then right/wrong five times.
  s.Step(Answer::kSame);
  for (int i = 0; i < 10; ++i) {
    ASSERT_FALSE(s.finished());
    s.Step(i % 2 == 0 ? Answer::kDifferent : Answer::kSame);
  }
  EXPECT_EQ(s.termination(), Termination::kAlternation);
  EXPECT_EQ(s.trials().size(), 11u);
  EXPECT_STREQ(TerminationName(s.termination()), "alternation_rule");
}

TEST(StaircaseTest, NextIsStableUntilAnswered) {
  Staircase s(StaircaseConfig{}, 77);
  const Stimulus first = s.Next();
  const Stimulus again = s.Next();
  EXPECT_EQ(first.r, again.r);
  EXPECT_EQ(first.delta_m, again.delta_m);
}

TEST(StaircaseTest, SecondDepthIsClamped) {
  StaircaseConfig cfg;
  cfg.base_depth_m = 0.95;
  cfg.initial_delta_m = 0.1;
  cfg.r_weights = {0.0, 0.0, 1.0};
  Staircase s(cfg, 1);
  const Stimulus& st = s.Next();
  EXPECT_EQ(st.second_depth_m, 1.0);
  EXPECT_TRUE(st.clamped);
  s.Step(Answer::kDifferent);
  EXPECT_TRUE(s.trials().back().clamped);
}

TEST(StaircaseTest, ConfigValidation) {
  StaircaseConfig cfg;
  cfg.down = 1.0;
  EXPECT_THROW(Staircase(cfg, 1), Error);
  cfg = {};
  cfg.up = 0.9;
  EXPECT_THROW(Staircase(cfg, 1), Error);
  cfg = {};
  cfg.initial_delta_m = 0.0;
  EXPECT_THROW(Staircase(cfg, 1), Error);
  cfg = {};
  cfg.r_weights = {0.0, 0.0, 0.0};
  EXPECT_THROW(Staircase(cfg, 1), Error);
}

TEST(EstimateTest, Examples) {
  std::vector<StaircaseTrial> t;
  for (double d : {9.0, 9.0, 0.02, 0.02, 0.02, 0.02, 0.02}) t.push_back(TrialWithDelta(d));
  EXPECT_NEAR(Estimate(t).jnd_m, 0.02, 1e-15);
  EXPECT_EQ(Estimate(t).trials, 7);

  t.clear();
  for (double d : {0.01, 0.02, 0.03, 0.04, 0.05}) t.push_back(TrialWithDelta(d));
  EXPECT_NEAR(Estimate(t).jnd_m, 0.03, 1e-15);

  t.pop_back();
  try {
    Estimate(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficient);
  }
}

TEST(ListenerTest, Examples) {
  const Listener l = SimulatedListener(0.02);
  EXPECT_EQ(l(1, 0.03), Answer::kDifferent);
  EXPECT_EQ(l(-1, 0.03), Answer::kDifferent);
  EXPECT_EQ(l(1, 0.01), Answer::kSame);
  EXPECT_EQ(l(0, 0.5), Answer::kSame);
  EXPECT_THROW(SimulatedListener(0.0), Error);
}

TEST(ListenerTest, LapseRateFlipsAnswers) {
  const Listener l = SimulatedListener(0.02, 0.25, 9);
  int flipped = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) flipped += l(1, 0.5) == Answer::kSame;
  EXPECT_NEAR(flipped / double(n), 0.25, 0.015);
}

TEST(StaircaseRecoveryTest, MedianOfHundredRunsNearThreshold) {
  StaircaseConfig cfg;
  const Listener l = SimulatedListener(0.02);
  std::vector<double> estimates;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const StaircaseRun run = RunStaircase(cfg, l, seed);
    EXPECT_LE(run.trials.size(), 20u);
    EXPECT_GT(run.estimate.jnd_m, 0.0);
    estimates.push_back(run.estimate.jnd_m);
  }
  const double median = Median(estimates);
  EXPECT_GE(median, 0.014);
  EXPECT_LE(median, 0.026);
}

TEST(StaircasePropertyTest, StepStaysPositive) {
  std::mt19937_64 rng(4);
  for (int run = 0; run < 200; ++run) {
    Staircase s(StaircaseConfig{}, rng());
    while (!s.finished()) {
      s.Next();
      s.Step(rng() % 2 ? Answer::kDifferent : Answer::kSame);
      ASSERT_GT(s.delta(), 0.0);
    }
    EXPECT_LE(s.trials().size(), 20u);
    for (const auto& t : s.trials()) EXPECT_GT(t.delta_m, 0.0);
  }
}

TEST(StaircasePropertyTest, CatchTrialsOnlyShrinkTheStep) {
  StaircaseConfig cfg;
  cfg.r_weights = {0.0, 1.0, 0.0};
  const Listener l = SimulatedListener(0.02);
  const StaircaseRun run = RunStaircase(cfg, l, 3);
  for (std::size_t i = 0; i < run.trials.size(); ++i) {
    EXPECT_TRUE(run.trials[i].correct);
    if (i > 0) EXPECT_LT(run.trials[i].delta_m, run.trials[i - 1].delta_m);
  }
}

TEST(StaircasePropertyTest, FinalStepsBracketThreshold) {
  // Without catch trials every answer moves the step towards the
  // threshold, so the last five settle in [t * down, t * up^2].
  StaircaseConfig cfg;
  cfg.r_weights = {1.0, 0.0, 1.0};
  for (double threshold : {0.01, 0.02, 0.05}) {
    const Listener l = SimulatedListener(threshold);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const StaircaseRun run = RunStaircase(cfg, l, seed);
      ASSERT_GE(run.trials.size(), 5u);
      for (std::size_t i = run.trials.size() - 5; i < run.trials.size(); ++i) {
        const double d = run.trials[i].delta_m;
        EXPECT_GE(d, threshold * cfg.down - 1e-12) << threshold << " " << seed;
        EXPECT_LE(d, threshold * cfg.up * cfg.up + 1e-12) << threshold << " " << seed;
      }
    }
  }
}

TEST(RenderPairTest, IdenticalWhenDepthsMatch) {
  for (SonificationKind kind : kAllKinds) {
    const SonificationSpec spec = SonificationSpec::Default(kind);
    const StimulusPair same = RenderPair(0.3, 0, 0.1, spec);
    EXPECT_EQ(same.first.left, same.second.left) << KindName(kind);
    EXPECT_EQ(same.first.right, same.second.right) << KindName(kind);
    const StimulusPair zero = RenderPair(0.3, 1, 0.0, spec);
    EXPECT_EQ(zero.first.left, zero.second.left) << KindName(kind);
    EXPECT_EQ(same.first.frames(), 44100u);
  }
}

TEST(RenderPairTest, ClampsSecondDepth) {
  const StimulusPair p =
      RenderPair(0.95, 1, 0.1, SonificationSpec::Default(SonificationKind::kBrr));
  EXPECT_EQ(p.second_depth_m, 1.0);
  EXPECT_TRUE(p.clamped);
  const StimulusPair q =
      RenderPair(0.5, 1, 0.1, SonificationSpec::Default(SonificationKind::kBrr));
  EXPECT_FALSE(q.clamped);
  EXPECT_NE(q.first.left, q.second.left);
}

}  // namespace
}  // namespace sonify
