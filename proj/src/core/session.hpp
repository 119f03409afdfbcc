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
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "protocol.hpp"
#include "session_log.hpp"

namespace sonify {

// Seeded Fisher-Yates permutation of the five sonifications.
std::vector<SonificationKind> SonificationOrder(std::uint64_t seed);

SessionHeader MakeHeader(const SessionConfig& config, std::string participant_id,
                         std::uint64_t seed);

// Owns the log of one participant session and runs its stages one at a
// time. Records are appended to the in-memory log and, when given, to a
// writer as they are produced.
class Session {
 public:
  Session(SessionConfig config, SessionHeader header, LogWriter* writer = nullptr);

  // Throws Error(kState) while another stage is running, or for stage 3
  // before stage 1 of the same sonification completed. `seed` overrides
  // the session seed for this stage's targets.
  std::vector<StageOutput> BeginStage(int stage_id, SonificationKind kind, double start_s,
                                      std::optional<std::uint64_t> seed = std::nullopt);
  std::vector<StageOutput> Handle(const StageEvent& event);

  void AddRecord(const LogRecord& record);

  bool stage_running() const { return runner_ && !runner_->finished(); }
  const StageRunner* runner() const { return runner_.get(); }
  const SessionLog& log() const { return log_; }
  const SessionConfig& config() const { return config_; }

 private:
  void Record(const std::vector<StageOutput>& outputs);

  SessionConfig config_;
  SessionLog log_;
  LogWriter* writer_;
  std::unique_ptr<StageRunner> runner_;
  int next_trial_id_ = 1;
  int next_task_id_ = 1;
};

}  // namespace sonify
