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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "protocol.hpp"
#include "staircase.hpp"

namespace sonify {

inline constexpr int kLogSchemaVersion = 1;

struct SessionHeader {
  int schema_version = kLogSchemaVersion;
  std::string participant_id = "anonymous";
  std::uint64_t seed = 0;
  double volume_gain = 1.0;
  std::vector<SonificationKind> sonification_order;
  std::map<std::string, std::string> config;  // ConfigSettings snapshot
  std::string notes;
};

struct JndTrialRecord {
  SonificationKind sonification = SonificationKind::kFreq;
  StaircaseTrial trial;
};

struct JndEstimateRecord {
  SonificationKind sonification = SonificationKind::kFreq;
  double base_depth_m = 0.0;
  std::uint64_t seed = 0;
  std::string listener;
  JndEstimate estimate;
};

struct NoteRecord {
  double t_s = 0.0;
  std::string text;
};

using LogRecord = std::variant<LearningRecord, TrialRecord, StageEndRecord,
                               JndTrialRecord, JndEstimateRecord, NoteRecord>;

struct SessionLog {
  SessionHeader header;
  std::vector<LogRecord> records;

  std::vector<TrialRecord> positioning() const;
  std::vector<LearningRecord> learning() const;
  std::vector<StageEndRecord> stage_ends() const;
  // True when a complete stage_end record exists for the pair.
  bool StageCompleted(int stage_id, SonificationKind kind) const;
  SessionConfig Config() const;
};

// One JSON object per line; the header first. Field order is fixed so that
// equal logs serialize to equal bytes.
std::string SerializeHeader(const SessionHeader& header);
std::string SerializeRecord(const LogRecord& record);
std::string SerializeLog(const SessionLog& log);

// Throws Error(kParse) on malformed lines or unknown record types and
// Error(kSchema) on a missing or different schema version.
SessionLog ParseLog(std::istream& in, const std::string& origin = "log");
SessionLog ReadLog(const std::filesystem::path& path);
void WriteLog(const std::filesystem::path& path, const SessionLog& log);

struct LogIssue {
  std::size_t record_index = 0;
  std::string message;
};

// Self-consistency: stored errors equal recomputation, and every
// positioning target regenerates from its seed under the logged config.
std::vector<LogIssue> VerifyLog(const SessionLog& log);

// Serialized, line-flushed appender. Opening an existing log checks its
// header schema and appends; a new file starts with `header`.
class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, const SessionHeader& header);

  void Append(const LogRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace sonify
