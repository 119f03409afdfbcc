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

#include "session_log.hpp"

#include <sstream>

#include "json.hpp"

#include "error.hpp"

namespace sonify {

namespace {

using Json = nlohmann::ordered_json;

Json TargetJson(const SpatialTarget& t) {
  Json j;
  j["depth_m"] = t.depth.value;
  if (t.azimuth) j["azimuth_deg"] = t.azimuth->value;
  return j;
}

SpatialTarget TargetFromJson(const Json& j) {
  SpatialTarget t;
  t.depth = {j.at("depth_m").get<double>()};
  if (j.contains("azimuth_deg")) t.azimuth = AzimuthDegrees{j.at("azimuth_deg").get<double>()};
  return t;
}

std::string KindString(SonificationKind kind) { return std::string(KindName(kind)); }

SonificationKind KindFromJson(const Json& j) { return ParseKind(j.get<std::string>()); }

Json RecordJson(const LogRecord& record) {
  return std::visit(
      [](const auto& r) -> Json {
        using R = std::decay_t<decltype(r)>;
        Json j;
        if constexpr (std::is_same_v<R, LearningRecord>) {
          j["type"] = "learning";
          j["task_id"] = r.task_id;
          j["stage_id"] = r.stage_id;
          j["sonification"] = KindString(r.sonification);
          j["duration_s"] = r.duration_s;
          j["coverage"] = r.coverage;
          j["pauses"] = r.pauses;
          j["complete"] = r.complete;
        } else if constexpr (std::is_same_v<R, TrialRecord>) {
          j["type"] = "positioning";
          j["trial_id"] = r.trial_id;
          j["stage_id"] = r.stage_id;
          j["sonification"] = KindString(r.sonification);
          j["target"] = TargetJson(r.target);
          j["placed"] = r.placed ? TargetJson(*r.placed) : Json(nullptr);
          j["abs_depth_error_cm"] = r.abs_depth_error_cm;
          j["abs_azimuth_error_deg"] =
              r.abs_azimuth_error_deg ? Json(*r.abs_azimuth_error_deg) : Json(nullptr);
          j["response_time_s"] = r.response_time_s;
          j["prng_seed"] = r.prng_seed;
          j["resamples"] = r.resamples;
          j["replays"] = r.replays;
          j["aborted"] = r.aborted;
        } else if constexpr (std::is_same_v<R, StageEndRecord>) {
          j["type"] = "stage_end";
          j["stage_id"] = r.stage_id;
          j["sonification"] = KindString(r.sonification);
          j["complete"] = r.complete;
          j["learning_count"] = r.learning_count;
          j["positioning_count"] = r.positioning_count;
        } else if constexpr (std::is_same_v<R, JndTrialRecord>) {
          j["type"] = "jnd_trial";
          j["sonification"] = KindString(r.sonification);
          j["index"] = r.trial.index;
          j["base_depth_m"] = r.trial.base_depth_m;
          j["r"] = r.trial.r;
          j["delta_m"] = r.trial.delta_m;
          j["answer"] = r.trial.answer == Answer::kDifferent ? "different" : "same";
          j["correct"] = r.trial.correct;
          j["clamped"] = r.trial.clamped;
        } else if constexpr (std::is_same_v<R, JndEstimateRecord>) {
          j["type"] = "jnd_estimate";
          j["sonification"] = KindString(r.sonification);
          j["base_depth_m"] = r.base_depth_m;
          j["seed"] = r.seed;
          j["listener"] = r.listener;
          j["jnd_m"] = r.estimate.jnd_m;
          j["trials"] = r.estimate.trials;
          j["termination"] = TerminationName(r.estimate.reason);
        } else {
          j["type"] = "note";
          j["t_s"] = r.t_s;
          j["text"] = r.text;
        }
        return j;
      },
      record);
}

Termination TerminationFromString(const std::string& s) {
  if (s == "max_trials") return Termination::kMaxTrials;
  if (s == "alternation_rule") return Termination::kAlternation;
  if (s == "running") return Termination::kRunning;
  throw Error(ErrorCode::kParse, "unknown termination reason " + s);
}

LogRecord RecordFromJson(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "learning") {
    LearningRecord r;
    r.task_id = j.at("task_id").get<int>();
    r.stage_id = j.at("stage_id").get<int>();
    r.sonification = KindFromJson(j.at("sonification"));
    r.duration_s = j.at("duration_s").get<double>();
    const auto cov = j.at("coverage").get<std::vector<int>>();
    if (cov.size() != r.coverage.size()) {
      throw Error(ErrorCode::kParse, "coverage must have 10 bins");
    }
    std::copy(cov.begin(), cov.end(), r.coverage.begin());
    r.pauses = j.at("pauses").get<int>();
    r.complete = j.at("complete").get<bool>();
    return r;
  }
  if (type == "positioning") {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<int>();
    r.stage_id = j.at("stage_id").get<int>();
    r.sonification = KindFromJson(j.at("sonification"));
    r.target = TargetFromJson(j.at("target"));
    if (!j.at("placed").is_null()) r.placed = TargetFromJson(j.at("placed"));
    r.abs_depth_error_cm = j.at("abs_depth_error_cm").get<double>();
    if (!j.at("abs_azimuth_error_deg").is_null()) {
      r.abs_azimuth_error_deg = j.at("abs_azimuth_error_deg").get<double>();
    }
    r.response_time_s = j.at("response_time_s").get<double>();
    r.prng_seed = j.at("prng_seed").get<std::uint64_t>();
    r.resamples = j.at("resamples").get<int>();
    r.replays = j.at("replays").get<int>();
    r.aborted = j.at("aborted").get<bool>();
    return r;
  }
  if (type == "stage_end") {
    StageEndRecord r;
    r.stage_id = j.at("stage_id").get<int>();
    r.sonification = KindFromJson(j.at("sonification"));
    r.complete = j.at("complete").get<bool>();
    r.learning_count = j.at("learning_count").get<int>();
    r.positioning_count = j.at("positioning_count").get<int>();
    return r;
  }
  if (type == "jnd_trial") {
    JndTrialRecord r;
    r.sonification = KindFromJson(j.at("sonification"));
    r.trial.index = j.at("index").get<int>();
    r.trial.base_depth_m = j.at("base_depth_m").get<double>();
    r.trial.r = j.at("r").get<int>();
    r.trial.delta_m = j.at("delta_m").get<double>();
    const std::string answer = j.at("answer").get<std::string>();
    if (answer != "different" && answer != "same") {
      throw Error(ErrorCode::kParse, "answer must be 'different' or 'same'");
    }
    r.trial.answer = answer == "different" ? Answer::kDifferent : Answer::kSame;
    r.trial.correct = j.at("correct").get<bool>();
    r.trial.clamped = j.at("clamped").get<bool>();
    return r;
  }
  if (type == "jnd_estimate") {
    JndEstimateRecord r;
    r.sonification = KindFromJson(j.at("sonification"));
    r.base_depth_m = j.at("base_depth_m").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.listener = j.at("listener").get<std::string>();
    r.estimate.jnd_m = j.at("jnd_m").get<double>();
    r.estimate.trials = j.at("trials").get<int>();
    r.estimate.reason = TerminationFromString(j.at("termination").get<std::string>());
    return r;
  }
  if (type == "note") {
    NoteRecord r;
    r.t_s = j.at("t_s").get<double>();
    r.text = j.at("text").get<std::string>();
    return r;
  }
  throw Error(ErrorCode::kParse, "unknown record type '" + type + "'");
}

SessionHeader HeaderFromJson(const Json& j, const std::string& origin) {
  if (!j.is_object() || j.value("type", "") != "header") {
    throw Error(ErrorCode::kSchema, origin + ": first record must be the header");
  }
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    throw Error(ErrorCode::kSchema, origin + ": header lacks schema_version");
  }
  SessionHeader h;
  h.schema_version = j.at("schema_version").get<int>();
  if (h.schema_version != kLogSchemaVersion) {
    throw Error(ErrorCode::kSchema,
                origin + ": schema version " + std::to_string(h.schema_version) +
                    " is not supported (expected " + std::to_string(kLogSchemaVersion) + ")");
  }
  h.participant_id = j.at("participant_id").get<std::string>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.volume_gain = j.at("volume_gain").get<double>();
  for (const Json& k : j.at("sonification_order")) h.sonification_order.push_back(KindFromJson(k));
  for (const auto& [key, value] : j.at("config").items()) {
    h.config[key] = value.get<std::string>();
  }
  h.notes = j.value("notes", "");
  return h;
}

}  // namespace

std::vector<TrialRecord> SessionLog::positioning() const {
  std::vector<TrialRecord> out;
  for (const LogRecord& r : records) {
    if (const auto* t = std::get_if<TrialRecord>(&r)) out.push_back(*t);
  }
  return out;
}

std::vector<LearningRecord> SessionLog::learning() const {
  std::vector<LearningRecord> out;
  for (const LogRecord& r : records) {
    if (const auto* t = std::get_if<LearningRecord>(&r)) out.push_back(*t);
  }
  return out;
}

std::vector<StageEndRecord> SessionLog::stage_ends() const {
  std::vector<StageEndRecord> out;
  for (const LogRecord& r : records) {
    if (const auto* t = std::get_if<StageEndRecord>(&r)) out.push_back(*t);
  }
  return out;
}

bool SessionLog::StageCompleted(int stage_id, SonificationKind kind) const {
  for (const LogRecord& r : records) {
    const auto* e = std::get_if<StageEndRecord>(&r);
    if (e && e->stage_id == stage_id && e->sonification == kind && e->complete) return true;
  }
  return false;
}

SessionConfig SessionLog::Config() const {
  SessionConfig config;
  for (const auto& [key, value] : header.config) ApplySetting(config, key, value);
  config.Validate();
  return config;
}

std::string SerializeHeader(const SessionHeader& h) {
  Json j;
  j["type"] = "header";
  j["schema_version"] = h.schema_version;
  j["participant_id"] = h.participant_id;
  j["seed"] = h.seed;
  j["volume_gain"] = h.volume_gain;
  Json order = Json::array();
  for (SonificationKind k : h.sonification_order) order.push_back(KindString(k));
  j["sonification_order"] = order;
  Json config = Json::object();
  for (const auto& [key, value] : h.config) config[key] = value;
  j["config"] = config;
  j["notes"] = h.notes;
  return j.dump();
}

std::string SerializeRecord(const LogRecord& record) { return RecordJson(record).dump(); }

std::string SerializeLog(const SessionLog& log) {
  std::string out = SerializeHeader(log.header);
  out += '\n';
  for (const LogRecord& r : log.records) {
    out += SerializeRecord(r);
    out += '\n';
  }
  return out;
}

SessionLog ParseLog(std::istream& in, const std::string& origin) {
  SessionLog log;
  std::string line;
  int number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(number);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!have_header) {
      try {
        log.header = HeaderFromJson(j, where);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kSchema, where + ": bad header: " + e.what());
      }
      have_header = true;
      continue;
    }
    if (j.is_object() && j.value("type", "") == "header") {
      // A second writer appended to the same file; it must agree on schema.
      HeaderFromJson(j, where);
      continue;
    }
    try {
      log.records.push_back(RecordFromJson(j));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::kInvalidArgument ? ErrorCode::kParse : e.code(),
                  where + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kInsufficient, origin + ": empty log");
  return log;
}

SessionLog ReadLog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open log " + path.string());
  return ParseLog(in, path.string());
}

void WriteLog(const std::filesystem::path& path, const SessionLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write log " + path.string());
  out << SerializeLog(log);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<LogIssue> VerifyLog(const SessionLog& log) {
  std::vector<LogIssue> issues;
  SessionConfig config;
  try {
    config = log.Config();
  } catch (const Error& e) {
    issues.push_back({0, std::string("config snapshot: ") + e.what()});
    return issues;
  }
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto* t = std::get_if<TrialRecord>(&log.records[i]);
    if (t == nullptr) continue;
    if (!t->ErrorsConsistent()) {
      issues.push_back({i + 1, "stored errors differ from recomputation"});
    }
    try {
      const StageSpec stage = StageSpec::ForStage(t->stage_id);
      const TargetDraw draw = GenerateTarget(stage, config.geometry, t->prng_seed);
      const bool same_az =
          draw.target.azimuth.has_value() == t->target.azimuth.has_value() &&
          (!draw.target.azimuth || draw.target.azimuth->value == t->target.azimuth->value);
      if (draw.target.depth.value != t->target.depth.value || !same_az ||
          draw.resamples != t->resamples) {
        issues.push_back({i + 1, "target does not regenerate from its seed"});
      }
    } catch (const Error& e) {
      issues.push_back({i + 1, e.what()});
    }
  }
  return issues;
}

LogWriter::LogWriter(const std::filesystem::path& path, const SessionHeader& header)
    : path_(path) {
  std::error_code ec;
  const bool exists = std::filesystem::exists(path, ec) &&
                      std::filesystem::file_size(path, ec) > 0;
  if (exists) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    Json j;
    try {
      j = Json::parse(first);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchema, path.string() + ": unreadable header: " + e.what());
    }
    HeaderFromJson(j, path.string());
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::kIo, "cannot open log " + path.string());
  if (!exists) {
    out_ << SerializeHeader(header) << '\n';
    out_.flush();
  }
}

void LogWriter::Append(const LogRecord& record) {
  const std::string line = SerializeRecord(record);
  std::lock_guard<std::mutex> lock(mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "write failed for " + path_.string());
}

}  // namespace sonify
