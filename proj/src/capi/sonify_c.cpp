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

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "error.hpp"
#include "freeverb.hpp"
#include "mapping.hpp"
#include "rt60.hpp"
#include "server.hpp"
#include "session.hpp"
#include "session_log.hpp"
#include "simulate.hpp"
#include "staircase.hpp"
#include "trajectory.hpp"
#include "wav.hpp"

struct sonify_config {
  sonify::SessionConfig config;
};

struct sonify_log {
  sonify::SessionLog log;
};

struct sonify_server {
  std::unique_ptr<sonify::Server> server;
};

namespace {

thread_local std::string g_last_error;

sonify_status Fail(sonify_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
sonify_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SONIFY_OK;
  } catch (const sonify::Error& e) {
    return Fail(static_cast<sonify_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SONIFY_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SONIFY_E_INTERNAL, e.what());
  }
}

void Require(const void* p, const char* what) {
  if (p == nullptr) {
    throw sonify::Error(sonify::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

sonify::SonificationKind ToKind(sonify_kind kind) {
  if (kind < SONIFY_FREQ || kind > SONIFY_SNR) {
    throw sonify::Error(sonify::ErrorCode::kInvalidArgument, "unknown sonification");
  }
  return sonify::kAllKinds[static_cast<std::size_t>(kind)];
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// "sim:THRESH[:LAPSE]" -> (threshold, lapse).
std::pair<double, double> ParseSimListener(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec.substr(4));
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') {
      throw sonify::Error(sonify::ErrorCode::kInvalidArgument, "bad listener '" + spec + "'");
    }
    v.push_back(x);
  }
  if (v.empty() || v.size() > 2) {
    throw sonify::Error(sonify::ErrorCode::kInvalidArgument,
                        "listener must be human or sim:THRESH[:LAPSE]");
  }
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

}  // namespace

extern "C" {

const char* sonify_version(void) { return "1.0.0"; }

const char* sonify_last_error(void) { return g_last_error.c_str(); }

const char* sonify_status_name(sonify_status status) {
  switch (status) {
    case SONIFY_OK: return "ok";
    case SONIFY_E_DOMAIN: return "domain";
    case SONIFY_E_OUT_OF_RANGE: return "out_of_range";
    case SONIFY_E_INVALID_ARGUMENT: return "invalid_argument";
    case SONIFY_E_STATE: return "state";
    case SONIFY_E_CONFIG: return "config";
    case SONIFY_E_IO: return "io";
    case SONIFY_E_PARSE: return "parse";
    case SONIFY_E_SCHEMA: return "schema";
    case SONIFY_E_DEGENERATE: return "degenerate";
    case SONIFY_E_INSUFFICIENT: return "insufficient";
    case SONIFY_E_NETWORK: return "network";
    case SONIFY_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void sonify_string_free(char* s) { std::free(s); }

sonify_status sonify_kind_parse(const char* name, sonify_kind* out) {
  return Guard([&] {
    Require(name, "name");
    Require(out, "out");
    *out = static_cast<sonify_kind>(static_cast<int>(sonify::ParseKind(name)));
  });
}

const char* sonify_kind_name(sonify_kind kind) {
  if (kind < SONIFY_FREQ || kind > SONIFY_SNR) return "unknown";
  return sonify::KindName(ToKind(kind)).data();
}

sonify_status sonify_config_load(const char* path, int use_env, sonify_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = nullptr;
    std::optional<std::string> file;
    if (path != nullptr) file = path;
    const sonify::EnvLookup none = [](const std::string&) { return std::optional<std::string>(); };
    auto c = std::make_unique<sonify_config>();
    c->config = sonify::LoadConfig(file, use_env ? sonify::ProcessEnvironment() : none);
    *out = c.release();
  });
}

sonify_status sonify_config_set(sonify_config* config, const char* key, const char* value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    sonify::SessionConfig next = config->config;
    sonify::ApplySetting(next, key, value);
    next.Validate();
    config->config = std::move(next);
  });
}

sonify_status sonify_config_dump(const sonify_config* config, char** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    std::string text;
    for (const auto& [k, v] : sonify::ConfigSettings(config->config)) text += k + "=" + v + "\n";
    *out = Dup(text);
  });
}

void sonify_config_free(sonify_config* config) { delete config; }

sonify_status sonify_map_depth(const sonify_config* config, sonify_kind kind, double depth_m,
                               double* param) {
  return Guard([&] {
    Require(config, "config");
    Require(param, "param");
    *param = sonify::MapDepth(sonify::DepthMeters{depth_m}, config->config.spec(ToKind(kind)));
  });
}

sonify_status sonify_unmap_param(const sonify_config* config, sonify_kind kind, double param,
                                 double* depth_m) {
  return Guard([&] {
    Require(config, "config");
    Require(depth_m, "depth_m");
    *depth_m = sonify::UnmapParam(param, config->config.spec(ToKind(kind))).value;
  });
}

sonify_status sonify_render_trajectory(const sonify_config* config, sonify_kind kind,
                                       const char* trajectory_path, double duration_s,
                                       const char* wav_path, sonify_render_info* info) {
  return Guard([&] {
    Require(config, "config");
    Require(trajectory_path, "trajectory_path");
    Require(wav_path, "wav_path");
    const auto points = sonify::ReadTrajectory(trajectory_path);
    sonify::RenderDiagnostics diag;
    const sonify::AudioBlock block = sonify::RenderTrajectory(
        config->config.spec(ToKind(kind)), points, duration_s, config->config.synth, &diag);
    sonify::WriteWav(wav_path, block);
    if (info != nullptr) {
      info->frames = block.frames();
      info->sample_rate = block.sample_rate;
      info->peak = sonify::PeakAbs(block);
      info->clipped_samples = diag.clipped_samples;
      info->onsets = diag.onsets;
    }
  });
}

sonify_status sonify_reverb_ir(double rt60_s, int32_t sample_rate, const char* wav_path,
                               const char* csv_path, double* measured_rt60_s) {
  return Guard([&] {
    if (sample_rate <= 0) {
      throw sonify::Error(sonify::ErrorCode::kInvalidArgument, "sample rate must be positive");
    }
    const sonify::FreeverbConfig fv = sonify::Calibrate(rt60_s, sample_rate);
    const double length = std::max(1.0, 2.0 * rt60_s + 0.5);
    std::vector<float> ir = sonify::ImpulseResponse(fv, sample_rate, length);
    const sonify::DecayCurve curve = sonify::MeasureRt60(ir, sample_rate);
    if (wav_path != nullptr) {
      sonify::AudioBlock block = sonify::AudioBlock::Mono(ir, sample_rate);
      const float peak = sonify::PeakAbs(block);
      if (peak > 1.0f) {
        for (float& s : block.left) s /= peak;
        for (float& s : block.right) s /= peak;
      }
      sonify::WriteWav(wav_path, block);
    }
    if (csv_path != nullptr) {
      std::ofstream out(csv_path);
      if (!out) throw sonify::Error(sonify::ErrorCode::kIo, std::string("cannot write ") + csv_path);
      out << "time_s,level_db\n";
      out.precision(10);
      for (std::size_t i = 0; i < curve.time_s.size(); ++i) {
        out << curve.time_s[i] << ',' << curve.level_db[i] << '\n';
      }
      if (!out) throw sonify::Error(sonify::ErrorCode::kIo, std::string("write failed for ") + csv_path);
    }
    if (measured_rt60_s != nullptr) *measured_rt60_s = curve.rt60_s;
  });
}

sonify_status sonify_log_read(const char* path, sonify_log** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    auto l = std::make_unique<sonify_log>();
    l->log = sonify::ReadLog(path);
    *out = l.release();
  });
}

sonify_status sonify_log_write(const sonify_log* log, const char* path) {
  return Guard([&] {
    Require(log, "log");
    Require(path, "path");
    sonify::WriteLog(path, log->log);
  });
}

sonify_status sonify_log_serialize(const sonify_log* log, char** out) {
  return Guard([&] {
    Require(log, "log");
    Require(out, "out");
    *out = Dup(sonify::SerializeLog(log->log));
  });
}

sonify_status sonify_log_counts(const sonify_log* log, int32_t stage, sonify_kind kind,
                                int32_t* learning, int32_t* positioning) {
  return Guard([&] {
    Require(log, "log");
    const sonify::SonificationKind k = ToKind(kind);
    int32_t nl = 0, np = 0;
    for (const auto& r : log->log.learning()) {
      if (r.stage_id == stage && r.sonification == k) ++nl;
    }
    for (const auto& r : log->log.positioning()) {
      if (r.stage_id == stage && r.sonification == k) ++np;
    }
    if (learning != nullptr) *learning = nl;
    if (positioning != nullptr) *positioning = np;
  });
}

sonify_status sonify_log_mean_depth_error(const sonify_log* log, int32_t stage,
                                          double* mean_cm, int32_t* trials) {
  return Guard([&] {
    Require(log, "log");
    Require(mean_cm, "mean_cm");
    double sum = 0.0;
    int32_t n = 0;
    for (const auto& r : log->log.positioning()) {
      if (r.aborted || (stage != 0 && r.stage_id != stage)) continue;
      sum += r.abs_depth_error_cm;
      ++n;
    }
    if (n == 0) throw sonify::Error(sonify::ErrorCode::kInsufficient, "no positioning trials");
    *mean_cm = sum / n;
    if (trials != nullptr) *trials = n;
  });
}

sonify_status sonify_log_verify(const sonify_log* log, int32_t* issues, char** report) {
  return Guard([&] {
    Require(log, "log");
    Require(issues, "issues");
    const auto found = sonify::VerifyLog(log->log);
    *issues = static_cast<int32_t>(found.size());
    if (report != nullptr) {
      std::string text;
      for (const auto& i : found) {
        text += "record " + std::to_string(i.record_index) + ": " + i.message + "\n";
      }
      *report = Dup(text);
    }
  });
}

void sonify_log_free(sonify_log* log) { delete log; }

sonify_status sonify_simulate(const sonify_config* config, const sonify_simulation* options,
                              const char* log_path, sonify_log** out) {
  return Guard([&] {
    Require(config, "config");
    if (out != nullptr) *out = nullptr;
    sonify::SimulationOptions opts;
    if (options != nullptr) {
      if (options->participant_id != nullptr) opts.participant_id = options->participant_id;
      opts.seed = options->seed;
      if (options->stages != nullptr && options->stage_count > 0) {
        opts.stages.assign(options->stages, options->stages + options->stage_count);
      }
      if (options->kinds != nullptr) {
        for (std::size_t i = 0; i < options->kind_count; ++i) {
          opts.kinds.push_back(ToKind(options->kinds[i]));
        }
      }
      if (options->model != nullptr) opts.model = sonify::ParticipantModel::Parse(options->model);
      if (options->learning_seconds > 0.0) opts.learning_seconds = options->learning_seconds;
    }
    sonify::SessionLog log = sonify::SimulateSession(config->config, opts);
    if (log_path != nullptr) sonify::WriteLog(log_path, log);
    if (out != nullptr) {
      auto l = std::make_unique<sonify_log>();
      l->log = std::move(log);
      *out = l.release();
    }
  });
}

sonify_status sonify_jnd(const sonify_config* config, sonify_kind kind, double base_depth_m,
                         uint64_t seed, const char* listener, sonify_answer_fn ask, void* user,
                         const char* pair_dir, const char* participant_id,
                         const char* log_path, sonify_jnd_result* out) {
  return Guard([&] {
    Require(config, "config");
    Require(listener, "listener");
    const sonify::SonificationKind k = ToKind(kind);
    const sonify::SonificationSpec spec = config->config.spec(k);
    const std::string who = listener;
    sonify::StaircaseConfig sc;
    sc.base_depth_m = base_depth_m;
    sc.Validate();

    sonify::Listener answer;
    std::filesystem::path dir;
    if (who == "human") {
      Require(reinterpret_cast<const void*>(ask), "ask");
      dir = pair_dir != nullptr ? pair_dir : ".";
      std::filesystem::create_directories(dir);
    } else if (who.rfind("sim:", 0) == 0) {
      const auto [threshold, lapse] = ParseSimListener(who);
      answer = sonify::SimulatedListener(threshold, lapse, seed ^ 0x6c697374656e6572ULL);
    } else {
      throw sonify::Error(sonify::ErrorCode::kInvalidArgument,
                          "listener must be human or sim:THRESH[:LAPSE]");
    }

    std::unique_ptr<sonify::LogWriter> writer;
    if (log_path != nullptr) {
      const sonify::SessionHeader header = sonify::MakeHeader(
          config->config, participant_id != nullptr ? participant_id : "jnd", seed);
      writer = std::make_unique<sonify::LogWriter>(log_path, header);
    }

    sonify::Staircase staircase(sc, seed);
    while (!staircase.finished()) {
      const sonify::Stimulus s = staircase.Next();
      sonify::Answer a = sonify::Answer::kSame;
      if (answer) {
        a = answer(s.r, s.delta_m);
      } else {
        const int index = static_cast<int>(staircase.trials().size()) + 1;
        const sonify::StimulusPair pair =
            sonify::RenderPair(base_depth_m, s.r, s.delta_m, spec, config->config.synth);
        const auto wav = dir / ("pair_" + std::to_string(index) + ".wav");
        sonify::WriteWav(wav.string(), sonify::Concatenate(pair.first, pair.second, 0.5));
        const sonify_answer reply = ask(user, index, wav.string().c_str());
        if (reply == SONIFY_ANSWER_ABORT) {
          throw sonify::Error(sonify::ErrorCode::kState, "staircase aborted by the listener");
        }
        a = reply == SONIFY_ANSWER_DIFFERENT ? sonify::Answer::kDifferent : sonify::Answer::kSame;
      }
      staircase.Step(a);
      if (writer) writer->Append(sonify::JndTrialRecord{k, staircase.trials().back()});
    }
    const sonify::JndEstimate est = sonify::Estimate(staircase.trials(), staircase.termination());
    if (writer) writer->Append(sonify::JndEstimateRecord{k, base_depth_m, seed, who, est});
    if (out != nullptr) {
      out->jnd_m = est.jnd_m;
      out->trials = est.trials;
      out->termination = sonify::TerminationName(est.reason);
    }
  });
}

sonify_status sonify_analyze(const char* logs_path, int32_t stage, const char* out_dir,
                             char** summary) {
  return Guard([&] {
    Require(logs_path, "logs_path");
    Require(out_dir, "out_dir");
    if (stage < 0 || stage > 3) {
      throw sonify::Error(sonify::ErrorCode::kInvalidArgument, "stage must be 0, 1, 2 or 3");
    }
    const std::vector<sonify::SessionLog> logs = sonify::LoadLogs(logs_path);
    const sonify::StatsReport report = sonify::BuildReport(logs, stage);
    sonify::WriteReport(report, out_dir);
    if (summary != nullptr) *summary = Dup(sonify::SummaryText(report));
  });
}

sonify_status sonify_server_create(const sonify_config* config, const char* participant_id,
                                   uint64_t seed, sonify_server** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<sonify_server>();
    s->server = std::make_unique<sonify::Server>(
        config->config, participant_id != nullptr ? participant_id : "participant", seed);
    *out = s.release();
  });
}

sonify_status sonify_server_handle_signals(sonify_server* server) {
  return Guard([&] {
    Require(server, "server");
    server->server->HandleSignals();
  });
}

sonify_status sonify_server_start(sonify_server* server) {
  return Guard([&] {
    Require(server, "server");
    server->server->Start();
  });
}

int32_t sonify_server_port(const sonify_server* server) {
  return server != nullptr ? server->server->port() : 0;
}

sonify_status sonify_server_wait(sonify_server* server) {
  return Guard([&] {
    Require(server, "server");
    server->server->Wait();
  });
}

sonify_status sonify_server_stop(sonify_server* server) {
  return Guard([&] {
    Require(server, "server");
    server->server->Stop();
  });
}

void sonify_server_free(sonify_server* server) { delete server; }

}  // extern "C"
