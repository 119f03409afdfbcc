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

// Command-line front end. Talks to the engine only through sonify.h.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sonify/sonify.h"

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> settings;  // key=value
  std::string log_path;
  double break_minutes = -1.0;
};

int Report(sonify_status status, const char* what) {
  std::fprintf(stderr, "sonify %s: %s: %s\n", what, sonify_status_name(status),
               sonify_last_error());
  return status == SONIFY_E_INVALID_ARGUMENT || status == SONIFY_E_PARSE ? 2 : 1;
}

// Owns a config handle for the duration of a command.
class Config {
 public:
  ~Config() { sonify_config_free(handle_); }

  sonify_status Load(const CommonOptions& o) {
    sonify_status s =
        sonify_config_load(o.config_path.empty() ? nullptr : o.config_path.c_str(), 1, &handle_);
    if (s != SONIFY_OK) return s;
    for (const std::string& kv : o.settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "sonify: --set expects key=value, got '%s'\n", kv.c_str());
        return SONIFY_E_INVALID_ARGUMENT;
      }
      s = Set(kv.substr(0, eq), kv.substr(eq + 1));
      if (s != SONIFY_OK) return s;
    }
    if (o.break_minutes >= 0.0) {
      s = Set("protocol.break_minutes", std::to_string(o.break_minutes));
      if (s != SONIFY_OK) return s;
    }
    return SONIFY_OK;
  }

  sonify_status Set(const std::string& key, const std::string& value) {
    return sonify_config_set(handle_, key.c_str(), value.c_str());
  }

  const sonify_config* get() const { return handle_; }

 private:
  sonify_config* handle_ = nullptr;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key=value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.settings, "override one setting, key=value (repeatable)");
}

sonify_status ParseKind(const std::string& name, sonify_kind* out) {
  return sonify_kind_parse(name.c_str(), out);
}

sonify_answer AskOnTerminal(void*, int32_t index, const char* wav) {
  for (;;) {
    std::printf("trial %d: play %s\n  [d]ifferent / [s]ame / [q]uit > ", index, wav);
    std::fflush(stdout);
    std::string line;
    if (!std::getline(std::cin, line)) return SONIFY_ANSWER_ABORT;
    if (line == "d" || line == "different") return SONIFY_ANSWER_DIFFERENT;
    if (line == "s" || line == "same") return SONIFY_ANSWER_SAME;
    if (line == "q" || line == "quit") return SONIFY_ANSWER_ABORT;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth sonification engine and experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sonify_version()));

  // render
  CommonOptions render_common;
  std::string render_kind, render_traj, render_out;
  double render_duration = 0.0;
  auto* render = app.add_subcommand("render", "render a depth trajectory to WAV");
  AddCommon(render, render_common);
  render->add_option("--sonification", render_kind, "freq|amp|reverb|brr|snr")->required();
  render->add_option("--trajectory", render_traj, "file of 't_s depth_m [azimuth_deg]' lines")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "output WAV")->required();
  render->add_option("--duration", render_duration, "seconds (default: last trajectory time)");

  // reverb-ir
  double ir_rt = 0.5;
  int ir_rate = 44100;
  std::string ir_wav, ir_csv;
  auto* reverb = app.add_subcommand("reverb-ir", "impulse response and decay curve for an RT60");
  reverb->add_option("--rt", ir_rt, "target RT60 in seconds")->required();
  reverb->add_option("--sample-rate", ir_rate, "Hz")->capture_default_str();
  reverb->add_option("--wav", ir_wav, "impulse response WAV");
  reverb->add_option("--csv", ir_csv, "decay curve CSV (time_s,level_db)");

  // simulate
  CommonOptions sim_common;
  std::vector<std::string> sim_kinds;
  std::vector<int> sim_stages;
  std::uint64_t sim_seed = 1;
  std::string sim_model = "gaussian", sim_participant = "sim-001";
  double sim_learning = 20.0;
  auto* simulate = app.add_subcommand("simulate", "run a headless session with a virtual participant");
  AddCommon(simulate, sim_common);
  simulate->add_option("--sonification", sim_kinds, "restrict to these sonifications");
  simulate->add_option("--stage", sim_stages, "stages to run (default 1 2 3)")
      ->check(CLI::Range(1, 3));
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--log", sim_common.log_path, "session log path")->required();
  simulate->add_option("--break-minutes", sim_common.break_minutes, "break before stage 3");
  simulate->add_option("--model", sim_model, "perfect|uniform|gaussian[:SIGMA_CM]")
      ->capture_default_str();
  simulate->add_option("--participant", sim_participant)->capture_default_str();
  simulate->add_option("--learning-seconds", sim_learning)->capture_default_str();

  // jnd
  CommonOptions jnd_common;
  std::string jnd_kind, jnd_listener = "human", jnd_pairs = "jnd_pairs",
                        jnd_participant = "participant";
  double jnd_base = 0.05;
  std::uint64_t jnd_seed = 1;
  auto* jnd = app.add_subcommand("jnd", "adaptive staircase for the just noticeable depth difference");
  AddCommon(jnd, jnd_common);
  jnd->add_option("--sonification", jnd_kind)->required();
  jnd->add_option("--base-depth", jnd_base, "meters")->required()->check(CLI::Range(0.0, 1.0));
  jnd->add_option("--seed", jnd_seed)->capture_default_str();
  jnd->add_option("--listener", jnd_listener, "human or sim:THRESH_M[:LAPSE]")
      ->capture_default_str();
  jnd->add_option("--log", jnd_common.log_path, "append trials and the estimate to this log");
  jnd->add_option("--pairs-dir", jnd_pairs, "where stimulus WAVs go (human listener)")
      ->capture_default_str();
  jnd->add_option("--participant", jnd_participant)->capture_default_str();

  // analyze
  std::string an_logs, an_out;
  int an_stage = 0;
  auto* analyze = app.add_subcommand("analyze", "statistics over session logs");
  analyze->add_option("--logs", an_logs, "log file or directory of *.jsonl")
      ->required()
      ->check(CLI::ExistingPath);
  analyze->add_option("--stage", an_stage, "1, 2, 3 or 0 for all")
      ->check(CLI::Range(0, 3))
      ->capture_default_str();
  analyze->add_option("--out", an_out, "report directory")->required();

  // serve
  CommonOptions serve_common;
  std::string serve_participant = "participant", serve_address, serve_mode;
  std::uint64_t serve_seed = 1;
  int serve_port = -1;
  double serve_rate = 0.0;
  auto* serve = app.add_subcommand("serve", "run the live experiment service");
  AddCommon(serve, serve_common);
  serve->add_option("--participant", serve_participant)->capture_default_str();
  serve->add_option("--seed", serve_seed)->capture_default_str();
  serve->add_option("--log", serve_common.log_path, "session log path");
  serve->add_option("--break-minutes", serve_common.break_minutes, "break before stage 3");
  serve->add_option("--address", serve_address, "listen address");
  serve->add_option("--port", serve_port, "listen port (0 = any free port)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--frame-rate", serve_rate, "frames per second")->check(CLI::Range(10.0, 120.0));
  serve->add_option("--audio-mode", serve_mode,
                    "client_synthesis_frames|server_rendered_stream");

  CLI11_PARSE(app, argc, argv);

  if (render->parsed()) {
    Config config;
    sonify_kind kind;
    sonify_status s = config.Load(render_common);
    if (s == SONIFY_OK) s = ParseKind(render_kind, &kind);
    if (s != SONIFY_OK) return Report(s, "render");
    sonify_render_info info{};
    s = sonify_render_trajectory(config.get(), kind, render_traj.c_str(), render_duration,
                                 render_out.c_str(), &info);
    if (s != SONIFY_OK) return Report(s, "render");
    std::printf("wrote %s: %llu frames at %d Hz, peak %.4f, %llu onsets, %llu clipped\n",
                render_out.c_str(), static_cast<unsigned long long>(info.frames),
                info.sample_rate, info.peak, static_cast<unsigned long long>(info.onsets),
                static_cast<unsigned long long>(info.clipped_samples));
    return 0;
  }

  if (reverb->parsed()) {
    double measured = 0.0;
    const sonify_status s =
        sonify_reverb_ir(ir_rt, ir_rate, ir_wav.empty() ? nullptr : ir_wav.c_str(),
                         ir_csv.empty() ? nullptr : ir_csv.c_str(), &measured);
    if (s != SONIFY_OK) return Report(s, "reverb-ir");
    std::printf("target RT60 %.3f s, measured %.4f s\n", ir_rt, measured);
    return 0;
  }

  if (simulate->parsed()) {
    Config config;
    sonify_status s = config.Load(sim_common);
    std::vector<sonify_kind> kinds(sim_kinds.size());
    for (std::size_t i = 0; s == SONIFY_OK && i < sim_kinds.size(); ++i) {
      s = ParseKind(sim_kinds[i], &kinds[i]);
    }
    if (s != SONIFY_OK) return Report(s, "simulate");
    std::vector<int32_t> stages(sim_stages.begin(), sim_stages.end());
    sonify_simulation opts{};
    opts.participant_id = sim_participant.c_str();
    opts.seed = sim_seed;
    opts.stages = stages.data();
    opts.stage_count = stages.size();
    opts.kinds = kinds.data();
    opts.kind_count = kinds.size();
    opts.model = sim_model.c_str();
    opts.learning_seconds = sim_learning;
    sonify_log* log = nullptr;
    s = sonify_simulate(config.get(), &opts, sim_common.log_path.c_str(), &log);
    if (s != SONIFY_OK) return Report(s, "simulate");
    double mean = 0.0;
    int32_t trials = 0;
    if (sonify_log_mean_depth_error(log, 0, &mean, &trials) == SONIFY_OK) {
      std::printf("wrote %s: %d positioning trials, mean |depth error| %.2f cm\n",
                  sim_common.log_path.c_str(), trials, mean);
    }
    sonify_log_free(log);
    return 0;
  }

  if (jnd->parsed()) {
    Config config;
    sonify_kind kind;
    sonify_status s = config.Load(jnd_common);
    if (s == SONIFY_OK) s = ParseKind(jnd_kind, &kind);
    if (s != SONIFY_OK) return Report(s, "jnd");
    sonify_jnd_result result{};
    s = sonify_jnd(config.get(), kind, jnd_base, jnd_seed, jnd_listener.c_str(), AskOnTerminal,
                   nullptr, jnd_pairs.c_str(), jnd_participant.c_str(),
                   jnd_common.log_path.empty() ? nullptr : jnd_common.log_path.c_str(), &result);
    if (s != SONIFY_OK) return Report(s, "jnd");
    std::printf("jnd %.4f m (%.2f cm) after %d trials, %s\n", result.jnd_m, result.jnd_m * 100.0,
                result.trials, result.termination);
    return 0;
  }

  if (analyze->parsed()) {
    char* summary = nullptr;
    const sonify_status s = sonify_analyze(an_logs.c_str(), an_stage, an_out.c_str(), &summary);
    if (s != SONIFY_OK) return Report(s, "analyze");
    std::fputs(summary, stdout);
    sonify_string_free(summary);
    return 0;
  }

  if (serve->parsed()) {
    Config config;
    sonify_status s = config.Load(serve_common);
    if (s == SONIFY_OK && !serve_common.log_path.empty()) {
      s = config.Set("service.log_path", serve_common.log_path);
    }
    if (s == SONIFY_OK && !serve_address.empty()) s = config.Set("service.address", serve_address);
    if (s == SONIFY_OK && serve_port >= 0) s = config.Set("service.port", std::to_string(serve_port));
    if (s == SONIFY_OK && serve_rate > 0.0) {
      s = config.Set("service.frame_rate_hz", std::to_string(serve_rate));
    }
    if (s == SONIFY_OK && !serve_mode.empty()) s = config.Set("service.audio_mode", serve_mode);
    if (s != SONIFY_OK) return Report(s, "serve");
    sonify_server* server = nullptr;
    s = sonify_server_create(config.get(), serve_participant.c_str(), serve_seed, &server);
    if (s == SONIFY_OK) s = sonify_server_handle_signals(server);
    if (s == SONIFY_OK) s = sonify_server_start(server);
    if (s != SONIFY_OK) {
      sonify_server_free(server);
      return Report(s, "serve");
    }
    std::printf("listening on port %d\n", sonify_server_port(server));
    std::fflush(stdout);
    sonify_server_wait(server);
    s = sonify_server_stop(server);
    sonify_server_free(server);
    if (s != SONIFY_OK) return Report(s, "serve");
    std::printf("stopped\n");
    return 0;
  }
  return 0;
}
