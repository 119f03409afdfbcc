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

#include "config.hpp"

#include <fstream>
#include <map>

#include "error.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace sonify {
namespace {

EnvLookup Env(std::map<std::string, std::string> vars) {
  return [vars](const std::string& key) -> std::optional<std::string> {
    auto it = vars.find(key);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST(ConfigTest, DefaultsMatchTheEncodingTable) {
  const SessionConfig c;
  EXPECT_EQ(c.spec(SonificationKind::kFreq).p_at_0m, 107.0);
  EXPECT_EQ(c.spec(SonificationKind::kSnr).p_at_1m, 0.05);
  EXPECT_EQ(c.spec(SonificationKind::kAmp).carrier_hz, 500.0);
  EXPECT_EQ(c.spec(SonificationKind::kReverb).carrier_hz, 1200.0);
  EXPECT_EQ(c.geometry.box_edge_cm, 28.0);
  EXPECT_EQ(c.break_minutes, 10.0);
  EXPECT_EQ(c.service.port, 8765);
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, FileThenEnvironment) {
  const auto dir = testing::TempDir("config");
  std::ofstream(dir / "c.conf") << "# test\n"
                                   "protocol.break_minutes = 0.5\n"
                                   "brr.p1 = 2   # slower at the far edge\n"
                                   "service.port = 9000\n";
  const SessionConfig c = LoadConfig((dir / "c.conf").string(),
                                     Env({{"SONIFY_SERVICE_PORT", "9100"}}));
  EXPECT_EQ(c.break_minutes, 0.5);
  EXPECT_EQ(c.spec(SonificationKind::kBrr).p_at_1m, 2.0);
  EXPECT_EQ(c.service.port, 9100);
}

TEST(ConfigTest, SettingsRoundTrip) {
  SessionConfig c;
  ApplySetting(c, "geometry.table", "-50,0; 50,0; 0,90");
  ApplySetting(c, "service.audio_mode", "server_rendered_stream");
  ApplySetting(c, "freq.quantize_semitones", "true");
  const auto settings = ConfigSettings(c);
  SessionConfig d;
  for (const auto& [k, v] : settings) ApplySetting(d, k, v);
  EXPECT_EQ(ConfigSettings(d), settings);
  EXPECT_EQ(d.geometry.table.size(), 3u);
  EXPECT_EQ(d.service.audio_mode, AudioMode::kServerRenderedStream);
  EXPECT_TRUE(d.spec(SonificationKind::kFreq).quantize_semitones);
}

TEST(ConfigTest, Rejections) {
  SessionConfig c;
  EXPECT_EQ(CodeOf([&] { ApplySetting(c, "nope", "1"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([&] { ApplySetting(c, "service.port", "http"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText(c, "missing equals\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { LoadConfig(std::string("/nonexistent/sonify.conf"), Env({})); }),
            ErrorCode::kIo);

  const auto bad = [](const std::string& key, const std::string& value) {
    return CodeOf([&] {
      SessionConfig c;
      ApplySetting(c, key, value);
      c.Validate();
    });
  };
  EXPECT_EQ(bad("service.port", "70000"), ErrorCode::kConfig);
  EXPECT_EQ(bad("amp.p1", "0"), ErrorCode::kConfig);  // endpoints coincide
  EXPECT_EQ(bad("geometry.depth_origin_cm", "0"), ErrorCode::kConfig);
  EXPECT_EQ(bad("synth.reverb_wet_mix", "1.5"), ErrorCode::kConfig);
  EXPECT_EQ(bad("service.frame_rate_hz", "0"), ErrorCode::kConfig);
}

TEST(ConfigTest, EnvironmentOverrideIsValidated) {
  EXPECT_EQ(CodeOf([] { LoadConfig(std::nullopt, Env({{"SONIFY_SAMPLE_RATE", "-1"}})); }),
            ErrorCode::kConfig);
}

}  // namespace
}  // namespace sonify
