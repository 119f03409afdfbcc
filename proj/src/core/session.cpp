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

#include "session.hpp"

#include <algorithm>
#include <utility>

#include "error.hpp"

namespace sonify {

std::vector<SonificationKind> SonificationOrder(std::uint64_t seed) {
  std::vector<SonificationKind> order(kAllKinds.begin(), kAllKinds.end());
  std::mt19937_64 rng(seed ^ 0x6f72646572ULL);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(Uniform01(rng) * static_cast<double>(i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  return order;
}

SessionHeader MakeHeader(const SessionConfig& config, std::string participant_id,
                         std::uint64_t seed) {
  SessionHeader h;
  h.participant_id = std::move(participant_id);
  h.seed = seed;
  h.volume_gain = config.synth.volume;
  h.sonification_order = SonificationOrder(seed);
  h.config = ConfigSettings(config);
  return h;
}

Session::Session(SessionConfig config, SessionHeader header, LogWriter* writer)
    : config_(std::move(config)), writer_(writer) {
  config_.Validate();
  log_.header = std::move(header);
}

std::vector<StageOutput> Session::BeginStage(int stage_id, SonificationKind kind,
                                             double start_s,
                                             std::optional<std::uint64_t> seed) {
  if (stage_running()) throw Error(ErrorCode::kState, "a stage is already running");
  if (stage_id == 3 && !log_.StageCompleted(1, kind)) {
    throw Error(ErrorCode::kState, "stage 3 requires a completed stage 1 for " +
                                       std::string(KindName(kind)));
  }
  StageRunnerOptions opts;
  opts.target_seconds = config_.target_seconds;
  opts.first_trial_id = next_trial_id_;
  opts.first_task_id = next_task_id_;
  runner_ = std::make_unique<StageRunner>(StageSpec::ForStage(stage_id, config_.break_minutes),
                                          config_.spec(kind), config_.geometry,
                                          seed.value_or(log_.header.seed), start_s, opts);
  auto out = runner_->Start();
  Record(out);
  return out;
}

std::vector<StageOutput> Session::Handle(const StageEvent& event) {
  if (!runner_) return {};
  auto out = runner_->Handle(event);
  Record(out);
  return out;
}

void Session::AddRecord(const LogRecord& record) {
  log_.records.push_back(record);
  if (writer_ != nullptr) writer_->Append(record);
}

void Session::Record(const std::vector<StageOutput>& outputs) {
  for (const StageOutput& o : outputs) {
    if (const auto* l = std::get_if<LearningDone>(&o)) {
      AddRecord(l->record);
    } else if (const auto* t = std::get_if<TrialDone>(&o)) {
      AddRecord(t->record);
    } else if (const auto* s = std::get_if<StageDone>(&o)) {
      AddRecord(s->record);
    }
  }
  if (runner_) {
    next_trial_id_ = runner_->next_trial_id();
    next_task_id_ = runner_->next_task_id();
  }
}

}  // namespace sonify
