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

#include "sonify/sonify.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sonify_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override { ASSERT_EQ(sonify_config_load(nullptr, 0, &config_), SONIFY_OK); }
  void TearDown() override { sonify_config_free(config_); }
  sonify_config* config_ = nullptr;
};

TEST(CApiBasicsTest, NamesAndKinds) {
  EXPECT_STRNE(sonify_version(), "");
  EXPECT_STREQ(sonify_status_name(SONIFY_E_PARSE), "parse");
  sonify_kind k;
  EXPECT_EQ(sonify_kind_parse("BRR", &k), SONIFY_OK);
  EXPECT_EQ(k, SONIFY_BRR);
  EXPECT_STREQ(sonify_kind_name(SONIFY_SNR), "snr");
  EXPECT_EQ(sonify_kind_parse("pitch", &k), SONIFY_E_INVALID_ARGUMENT);
  EXPECT_NE(std::string(sonify_last_error()).find("pitch"), std::string::npos);
  EXPECT_EQ(sonify_kind_parse(nullptr, &k), SONIFY_E_INVALID_ARGUMENT);
}

TEST_F(CApiTest, ConfigSetAndDump) {
  EXPECT_EQ(sonify_config_set(config_, "brr.p1", "2"), SONIFY_OK);
  EXPECT_EQ(sonify_config_set(config_, "service.port", "99999"), SONIFY_E_CONFIG);
  char* dump = nullptr;
  ASSERT_EQ(sonify_config_dump(config_, &dump), SONIFY_OK);
  const std::string text = dump;
  sonify_string_free(dump);
  EXPECT_NE(text.find("brr.p1=2\n"), std::string::npos);
  EXPECT_NE(text.find("service.port=8765\n"), std::string::npos);  // unchanged on error
}

TEST_F(CApiTest, MapAndUnmap) {
  double p = 0.0, d = 0.0;
  ASSERT_EQ(sonify_map_depth(config_, SONIFY_FREQ, 0.0, &p), SONIFY_OK);
  EXPECT_EQ(p, 107.0);
  ASSERT_EQ(sonify_map_depth(config_, SONIFY_AMP, 1.0, &p), SONIFY_OK);
  EXPECT_EQ(p, -40.0);
  ASSERT_EQ(sonify_unmap_param(config_, SONIFY_BRR, 5.5, &d), SONIFY_OK);
  EXPECT_DOUBLE_EQ(d, 0.5);
  EXPECT_EQ(sonify_unmap_param(config_, SONIFY_BRR, 11.0, &d), SONIFY_E_OUT_OF_RANGE);
  EXPECT_EQ(sonify_map_depth(config_, SONIFY_AMP, NAN, &p), SONIFY_E_DOMAIN);
}

TEST_F(CApiTest, RenderBrrCountsOnsets) {
  const fs::path dir = Scratch("render");
  std::ofstream(dir / "t.txt") << "# constant depth\n0 0.5\n2 0.5\n";
  sonify_render_info info{};
  ASSERT_EQ(sonify_render_trajectory(config_, SONIFY_BRR, (dir / "t.txt").c_str(), 0.0,
                                     (dir / "o.wav").c_str(), &info),
            SONIFY_OK)
      << sonify_last_error();
  EXPECT_EQ(info.onsets, 11u);
  EXPECT_EQ(info.frames, 2u * 44100u);
  EXPECT_EQ(info.sample_rate, 44100);
  EXPECT_EQ(fs::file_size(dir / "o.wav"), 44u + 2u * 44100u * 2u * 2u);
}

TEST_F(CApiTest, RenderAmpAtZeroIsHeadroomSine) {
  const fs::path dir = Scratch("render_amp");
  std::ofstream(dir / "t.txt") << "0 0\n1 0\n";
  sonify_render_info info{};
  ASSERT_EQ(sonify_render_trajectory(config_, SONIFY_AMP, (dir / "t.txt").c_str(), 0.0,
                                     (dir / "o.wav").c_str(), &info),
            SONIFY_OK);
  // Centered pan puts half of the -3 dB headroom amplitude on each channel.
  EXPECT_NEAR(info.peak, 0.5 * std::pow(10.0, -3.0 / 20.0), 0.01);
  EXPECT_EQ(info.clipped_samples, 0u);
}

TEST_F(CApiTest, RenderIsDeterministic) {
  const fs::path dir = Scratch("render_det");
  std::ofstream(dir / "t.txt") << "0 0.1 -30\n0.5 0.6 10\n1.0 0.9 45\n";
  for (const char* out : {"a.wav", "b.wav"}) {
    ASSERT_EQ(sonify_render_trajectory(config_, SONIFY_SNR, (dir / "t.txt").c_str(), 0.0,
                                       (dir / out).c_str(), nullptr),
              SONIFY_OK);
  }
  EXPECT_EQ(Slurp(dir / "a.wav"), Slurp(dir / "b.wav"));
}

TEST_F(CApiTest, RenderRejectsBadTrajectories) {
  const fs::path dir = Scratch("render_bad");
  std::ofstream(dir / "empty.txt") << "# nothing\n";
  std::ofstream(dir / "unsorted.txt") << "0 0.1\n1 0.2\n0.5 0.3\n";
  std::ofstream(dir / "garbage.txt") << "0 zero\n";
  const std::string wav = (dir / "o.wav").string();
  EXPECT_EQ(sonify_render_trajectory(config_, SONIFY_FREQ, (dir / "empty.txt").c_str(), 0.0,
                                     wav.c_str(), nullptr),
            SONIFY_E_INVALID_ARGUMENT);
  EXPECT_EQ(sonify_render_trajectory(config_, SONIFY_FREQ, (dir / "unsorted.txt").c_str(),
                                     0.0, wav.c_str(), nullptr),
            SONIFY_E_INVALID_ARGUMENT);
  EXPECT_EQ(sonify_render_trajectory(config_, SONIFY_FREQ, (dir / "garbage.txt").c_str(),
                                     0.0, wav.c_str(), nullptr),
            SONIFY_E_PARSE);
  EXPECT_EQ(sonify_render_trajectory(config_, SONIFY_FREQ, (dir / "missing.txt").c_str(),
                                     0.0, wav.c_str(), nullptr),
            SONIFY_E_IO);
  EXPECT_FALSE(fs::exists(dir / "o.wav"));
}

TEST(CApiReverbTest, ImpulseResponseFiles) {
  const fs::path dir = Scratch("reverb");
  double measured = 0.0;
  ASSERT_EQ(sonify_reverb_ir(0.5, 44100, (dir / "ir.wav").c_str(), (dir / "ir.csv").c_str(),
                             &measured),
            SONIFY_OK)
      << sonify_last_error();
  EXPECT_NEAR(measured, 0.5, 0.1);
  std::ifstream csv(dir / "ir.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "time_s,level_db");
  EXPECT_EQ(sonify_reverb_ir(3.0, 44100, nullptr, nullptr, &measured), SONIFY_E_OUT_OF_RANGE);
}

TEST_F(CApiTest, SimulateCountsAndVerify) {
  const fs::path dir = Scratch("simulate");
  const int32_t stages[] = {1, 2, 3};
  const sonify_kind kinds[] = {SONIFY_AMP};
  sonify_simulation opt{};
  opt.seed = 11;
  opt.stages = stages;
  opt.stage_count = 3;
  opt.kinds = kinds;
  opt.kind_count = 1;
  opt.model = "gaussian:10";
  sonify_log* log = nullptr;
  ASSERT_EQ(sonify_simulate(config_, &opt, (dir / "a.jsonl").c_str(), &log), SONIFY_OK)
      << sonify_last_error();
  int32_t learning = 0, positioning = 0;
  for (auto [stage, l, p] : {std::tuple{1, 3, 15}, std::tuple{2, 1, 5}, std::tuple{3, 0, 5}}) {
    ASSERT_EQ(sonify_log_counts(log, stage, SONIFY_AMP, &learning, &positioning), SONIFY_OK);
    EXPECT_EQ(learning, l);
    EXPECT_EQ(positioning, p);
  }
  int32_t issues = -1;
  ASSERT_EQ(sonify_log_verify(log, &issues, nullptr), SONIFY_OK);
  EXPECT_EQ(issues, 0);
  double mean = 0.0;
  int32_t trials = 0;
  ASSERT_EQ(sonify_log_mean_depth_error(log, 0, &mean, &trials), SONIFY_OK);
  EXPECT_EQ(trials, 25);
  EXPECT_GT(mean, 0.0);

  char* text = nullptr;
  ASSERT_EQ(sonify_log_serialize(log, &text), SONIFY_OK);
  EXPECT_EQ(std::string(text), Slurp(dir / "a.jsonl"));
  sonify_string_free(text);
  sonify_log_free(log);

  // Same seed, different path: identical bytes.
  ASSERT_EQ(sonify_simulate(config_, &opt, (dir / "b.jsonl").c_str(), nullptr), SONIFY_OK);
  EXPECT_EQ(Slurp(dir / "a.jsonl"), Slurp(dir / "b.jsonl"));

  sonify_log* back = nullptr;
  ASSERT_EQ(sonify_log_read((dir / "b.jsonl").c_str(), &back), SONIFY_OK);
  ASSERT_EQ(sonify_log_write(back, (dir / "c.jsonl").c_str()), SONIFY_OK);
  EXPECT_EQ(Slurp(dir / "a.jsonl"), Slurp(dir / "c.jsonl"));
  sonify_log_free(back);
}

TEST_F(CApiTest, SimulateRejectsBadOptions) {
  sonify_simulation opt{};
  opt.model = "telepathic";
  EXPECT_EQ(sonify_simulate(config_, &opt, nullptr, nullptr), SONIFY_E_INVALID_ARGUMENT);
  const int32_t stage3[] = {3};
  opt.model = nullptr;
  opt.stages = stage3;
  opt.stage_count = 1;
  EXPECT_EQ(sonify_simulate(config_, &opt, nullptr, nullptr), SONIFY_E_STATE);
}

TEST_F(CApiTest, JndSimulatedListener) {
  const fs::path dir = Scratch("jnd_sim");
  sonify_jnd_result r{};
  ASSERT_EQ(sonify_jnd(config_, SONIFY_FREQ, 0.05, 3, "sim:0.02", nullptr, nullptr, nullptr,
                       "p", (dir / "j.jsonl").c_str(), &r),
            SONIFY_OK)
      << sonify_last_error();
  EXPECT_GT(r.jnd_m, 0.0);
  EXPECT_LE(r.trials, 20);
  EXPECT_TRUE(std::strcmp(r.termination, "max_trials") == 0 ||
              std::strcmp(r.termination, "alternation_rule") == 0);
  const std::string log = Slurp(dir / "j.jsonl");
  EXPECT_NE(log.find("\"type\":\"jnd_estimate\""), std::string::npos);
  EXPECT_EQ(sonify_jnd(config_, SONIFY_FREQ, 0.05, 3, "sim:-1", nullptr, nullptr, nullptr,
                       "p", nullptr, &r),
            SONIFY_E_INVALID_ARGUMENT);
}

struct Asked {
  int calls = 0;
  bool files_exist = true;
};

sonify_answer AlwaysSame(void* user, int32_t, const char* wav) {
  auto* a = static_cast<Asked*>(user);
  ++a->calls;
  a->files_exist = a->files_exist && fs::exists(wav);
  return SONIFY_ANSWER_SAME;
}

sonify_answer AbortAtThird(void* user, int32_t index, const char*) {
  ++static_cast<Asked*>(user)->calls;
  return index >= 3 ? SONIFY_ANSWER_ABORT : SONIFY_ANSWER_DIFFERENT;
}

TEST_F(CApiTest, JndHumanCallback) {
  const fs::path dir = Scratch("jnd_human");
  Asked asked;
  sonify_jnd_result r{};
  ASSERT_EQ(sonify_jnd(config_, SONIFY_AMP, 0.95, 8, "human", AlwaysSame, &asked,
                       dir.c_str(), "p", nullptr, &r),
            SONIFY_OK)
      << sonify_last_error();
  EXPECT_EQ(asked.calls, r.trials);
  EXPECT_TRUE(asked.files_exist);
  EXPECT_STREQ(r.termination, "max_trials");

  Asked aborted;
  EXPECT_EQ(sonify_jnd(config_, SONIFY_AMP, 0.95, 8, "human", AbortAtThird, &aborted,
                       dir.c_str(), "p", nullptr, &r),
            SONIFY_E_STATE);
  EXPECT_EQ(aborted.calls, 3);
  EXPECT_EQ(sonify_jnd(config_, SONIFY_AMP, 0.95, 8, "human", nullptr, nullptr, dir.c_str(),
                       "p", nullptr, &r),
            SONIFY_E_INVALID_ARGUMENT);
}

TEST_F(CApiTest, AnalyzeWritesReport) {
  const fs::path dir = Scratch("analyze");
  fs::create_directories(dir / "logs");
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    sonify_simulation opt{};
    opt.seed = seed;
    const std::string id = "sim-" + std::to_string(seed);
    opt.participant_id = id.c_str();
    const std::string path = (dir / "logs" / (id + ".jsonl")).string();
    ASSERT_EQ(sonify_simulate(config_, &opt, path.c_str(), nullptr), SONIFY_OK);
  }
  char* summary = nullptr;
  ASSERT_EQ(sonify_analyze((dir / "logs").c_str(), 1, (dir / "out").c_str(), &summary),
            SONIFY_OK)
      << sonify_last_error();
  EXPECT_NE(std::string(summary).find("ANOVA"), std::string::npos) << summary;
  sonify_string_free(summary);
  EXPECT_TRUE(fs::exists(dir / "out" / "anova.csv"));
  EXPECT_EQ(sonify_analyze((dir / "nowhere").c_str(), 0, (dir / "out").c_str(), nullptr),
            SONIFY_E_IO);
}

TEST_F(CApiTest, ServerLifecycle) {
  const fs::path dir = Scratch("server");
  ASSERT_EQ(sonify_config_set(config_, "service.port", "0"), SONIFY_OK);
  ASSERT_EQ(sonify_config_set(config_, "service.log_path", (dir / "s.jsonl").c_str()),
            SONIFY_OK);
  sonify_server* server = nullptr;
  ASSERT_EQ(sonify_server_create(config_, "p", 1, &server), SONIFY_OK);
  ASSERT_EQ(sonify_server_start(server), SONIFY_OK) << sonify_last_error();
  EXPECT_GT(sonify_server_port(server), 0);
  EXPECT_EQ(sonify_server_stop(server), SONIFY_OK);
  sonify_server_free(server);
}

}  // namespace
