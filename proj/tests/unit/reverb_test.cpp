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

#include <cmath>
#include <random>

#include "error.hpp"
#include "freeverb.hpp"
#include "gtest/gtest.h"
#include "rt60.hpp"

namespace sonify {
namespace {

constexpr int kRate = 44100;

// Amplitude falling 60 dB over `rt` seconds.
std::vector<float> ExponentialDecay(double rt, double seconds, bool noise) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> h(static_cast<std::size_t>(seconds * kRate));
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double env = std::exp(-static_cast<double>(i) / kRate * std::log(1000.0) / rt);
    h[i] = static_cast<float>(env * (noise ? u(rng) : 1.0));
  }
  return h;
}

double MeasuredRt(double rt) {
  const FreeverbConfig cfg = Calibrate(rt, kRate);
  return MeasureRt60(ImpulseResponse(cfg, kRate, std::max(1.0, 3.0 * rt)), kRate).rt60_s;
}

TEST(Rt60Test, RecoversSyntheticExponential) {
  const DecayCurve c = MeasureRt60(ExponentialDecay(0.4, 1.5, false), kRate);
  EXPECT_NEAR(c.rt60_s, 0.4, 0.4 * 0.02);
  EXPECT_LT(c.fit_start_s, c.fit_end_s);
}

TEST(Rt60Test, RecoversDecayingNoise) {
  const DecayCurve c = MeasureRt60(ExponentialDecay(0.6, 2.0, true), kRate);
  EXPECT_NEAR(c.rt60_s, 0.6, 0.6 * 0.05);
}

TEST(Rt60Test, ScaleInvariant) {
  std::vector<float> h = ExponentialDecay(0.3, 1.0, true);
  const double a = MeasureRt60(h, kRate).rt60_s;
  for (float& v : h) v *= 2.0f;
  EXPECT_NEAR(MeasureRt60(h, kRate).rt60_s, a, 1e-9);
}

TEST(Rt60Test, CurveIsNormalizedAndNonIncreasing) {
  const DecayCurve c = MeasureRt60(ExponentialDecay(0.3, 1.0, true), kRate);
  ASSERT_FALSE(c.level_db.empty());
  EXPECT_NEAR(c.level_db.front(), 0.0, 1e-9);
  for (std::size_t i = 1; i < c.level_db.size(); ++i) {
    if (!std::isfinite(c.level_db[i])) break;
    ASSERT_LE(c.level_db[i], c.level_db[i - 1] + 1e-9);
  }
}

TEST(Rt60Test, InsufficientDecayReportsRange) {
  const std::vector<float> flat(kRate / 2, 0.5f);
  try {
    MeasureRt60(flat, kRate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficient);
    EXPECT_NE(std::string(e.what()).find("dB"), std::string::npos);
  }
}

TEST(FreeverbTest, CalibrationConsistency) {
  for (double rt : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    EXPECT_LE(std::abs(MeasuredRt(rt) - rt) / rt, 0.20) << rt;
  }
}

TEST(FreeverbTest, CalibrationEndpoints) {
  const double lo = MeasuredRt(0.05);
  EXPECT_GE(lo, 0.04);
  EXPECT_LE(lo, 0.06);
  const double hi = MeasuredRt(0.95);
  EXPECT_GE(hi, 0.76);
  EXPECT_LE(hi, 1.14);
}

TEST(FreeverbTest, LongerDecayNeedsMoreFeedback) {
  EXPECT_LT(Calibrate(0.3).comb_feedback, Calibrate(0.7).comb_feedback);
}

TEST(FreeverbTest, OutOfRangeNamesBounds) {
  for (double rt : {0.01, 3.0}) {
    try {
      Calibrate(rt);
      FAIL() << rt;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
      EXPECT_NE(std::string(e.what()).find("0.048"), std::string::npos) << e.what();
    }
  }
}

TEST(FreeverbTest, StableAndDecaysWithinFourRt) {
  for (double rt : {0.05, 0.3, 0.95, 1.5}) {
    const std::vector<float> h = ImpulseResponse(Calibrate(rt), kRate, 4.0 * rt + 0.5);
    double peak = 0.0, tail = 0.0, energy = 0.0;
    const std::size_t cut = static_cast<std::size_t>(4.0 * rt * kRate);
    for (std::size_t i = 0; i < h.size(); ++i) {
      energy += static_cast<double>(h[i]) * h[i];
      if (i < cut) {
        peak = std::max(peak, static_cast<double>(std::abs(h[i])));
      } else {
        tail = std::max(tail, static_cast<double>(std::abs(h[i])));
      }
    }
    EXPECT_TRUE(std::isfinite(energy));
    EXPECT_LT(20.0 * std::log10(tail / peak), -80.0) << rt;
  }
}

TEST(FreeverbTest, ShortestTimeTailGoneWithinATenthOfASecond) {
  const DecayCurve c = MeasureRt60(ImpulseResponse(Calibrate(0.05), kRate, 0.5), kRate);
  for (std::size_t i = 0; i < c.time_s.size(); ++i) {
    if (c.time_s[i] >= 0.1) {
      EXPECT_LT(c.level_db[i], -60.0);
      break;
    }
  }
}

TEST(FreeverbTest, SilenceInSilenceOut) {
  const AudioBlock out = Reverberate(AudioBlock(4410, kRate), 0.5);
  EXPECT_EQ(PeakAbs(out), 0.0f);
}

TEST(FreeverbTest, Linear) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(-0.4f, 0.4f);
  AudioBlock x(8820, kRate);
  for (std::size_t i = 0; i < x.frames(); ++i) {
    x.left[i] = u(rng);
    x.right[i] = u(rng);
  }
  const AudioBlock y = Reverberate(x, 0.4);
  for (float a : {0.5f, 2.0f}) {
    AudioBlock xs = x;
    for (float& v : xs.left) v *= a;
    for (float& v : xs.right) v *= a;
    const AudioBlock ys = Reverberate(xs, 0.4);
    ASSERT_EQ(ys.frames(), y.frames());
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < y.frames(); ++i) {
      err = std::max(err, static_cast<double>(std::abs(ys.left[i] - a * y.left[i])));
      ref = std::max(ref, static_cast<double>(std::abs(a * y.left[i])));
    }
    EXPECT_LE(err, 1e-6 * ref) << a;
  }
}

TEST(FreeverbTest, Deterministic) {
  const FreeverbConfig a = Calibrate(0.42);
  const FreeverbConfig b = Calibrate(0.42);
  EXPECT_EQ(a.comb_delays, b.comb_delays);
  EXPECT_EQ(a.comb_feedback, b.comb_feedback);
  EXPECT_EQ(a.wet_gain, b.wet_gain);
  EXPECT_EQ(ImpulseResponse(a, kRate, 0.5), ImpulseResponse(b, kRate, 0.5));
}

TEST(FreeverbTest, ValidateRejectsUnstableLoop) {
  FreeverbConfig cfg = FreeverbConfig::Canonical(kRate);
  cfg.comb_feedback = 1.01;
  EXPECT_THROW(cfg.Validate(), Error);
}

}  // namespace
}  // namespace sonify
