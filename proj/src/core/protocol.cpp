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

#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace sonify {

namespace {

constexpr int kMaxRejections = 1000;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

StageSpec StageSpec::ForStage(int stage_id, double break_minutes) {
  StageSpec s;
  s.stage_id = stage_id;
  auto add_block = [&s](int positioning) {
    s.plan.push_back(TaskKind::kLearning);
    s.plan.insert(s.plan.end(), positioning, TaskKind::kPositioning);
  };
  switch (stage_id) {
    case 1:
      for (int i = 0; i < 3; ++i) add_block(5);
      break;
    case 2:
      add_block(5);
      s.sonify_azimuth = true;
      break;
    case 3:
      s.plan.assign(5, TaskKind::kPositioning);
      s.break_minutes = break_minutes;
      break;
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "stage must be 1, 2 or 3, got " + std::to_string(stage_id));
  }
  return s;
}

int StageSpec::learning_count() const {
  return static_cast<int>(std::count(plan.begin(), plan.end(), TaskKind::kLearning));
}

int StageSpec::positioning_count() const {
  return static_cast<int>(std::count(plan.begin(), plan.end(), TaskKind::kPositioning));
}

void StageSpec::Validate() const {
  if (stage_id < 1 || stage_id > 3) {
    throw Error(ErrorCode::kInvalidArgument, "stage must be 1, 2 or 3");
  }
  if (plan.empty()) throw Error(ErrorCode::kInvalidArgument, "empty stage plan");
  if (!(break_minutes >= 0.0) || !std::isfinite(break_minutes)) {
    throw Error(ErrorCode::kInvalidArgument, "break must be a non-negative duration");
  }
}

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t DeriveSeed(std::uint64_t session_seed, int stage_id,
                         SonificationKind kind, int index) {
  std::uint64_t h = SplitMix64(session_seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stage_id));
  h = SplitMix64(h ^ static_cast<std::uint64_t>(static_cast<int>(kind) + 16));
  return SplitMix64(h ^ static_cast<std::uint64_t>(index + 1024));
}

TargetDraw GenerateTarget(const StageSpec& stage, const GeometryConfig& geometry,
                          std::mt19937_64& rng) {
  TargetDraw draw;
  if (!stage.sonify_azimuth) {
    // The upper endpoint is reachable only in the limit; [0, 1) is uniform.
    draw.target.depth = {Uniform01(rng)};
    return draw;
  }
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double depth = Uniform01(rng);
    const double az = -90.0 + 180.0 * Uniform01(rng);
    const auto x = TableXForTarget(depth * 100.0, {az});
    if (x && InsidePolygon(geometry.table, {*x, depth * 100.0})) {
      draw.target.depth = {depth};
      draw.target.azimuth = AzimuthDegrees{az};
      return draw;
    }
    ++draw.resamples;
  }
  throw Error(ErrorCode::kConfig,
              "no target inside the table polygon after " +
                  std::to_string(kMaxRejections) + " draws");
}

TargetDraw GenerateTarget(const StageSpec& stage, const GeometryConfig& geometry,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GenerateTarget(stage, geometry, rng);
}

AudioBlock PlayTarget(const SpatialTarget& target, const SonificationSpec& spec,
                      const SynthOptions& options, double duration_s) {
  const RenderFrame frame = MakeFrame(spec, target.depth, target.azimuth, 0.0);
  return Synthesize(spec, std::span(&frame, 1), duration_s, options);
}

void TrialRecord::ComputeErrors() {
  if (!placed) {
    abs_depth_error_cm = 0.0;
    abs_azimuth_error_deg.reset();
    return;
  }
  abs_depth_error_cm = std::abs(target.depth.value - placed->depth.value) * 100.0;
  if (target.azimuth && placed->azimuth) {
    abs_azimuth_error_deg = std::abs(target.azimuth->value - placed->azimuth->value);
  } else {
    abs_azimuth_error_deg.reset();
  }
}

bool TrialRecord::ErrorsConsistent(double tolerance) const {
  TrialRecord check = *this;
  check.ComputeErrors();
  if (std::abs(check.abs_depth_error_cm - abs_depth_error_cm) > tolerance) return false;
  if (check.abs_azimuth_error_deg.has_value() != abs_azimuth_error_deg.has_value()) {
    return false;
  }
  return !abs_azimuth_error_deg ||
         std::abs(*check.abs_azimuth_error_deg - *abs_azimuth_error_deg) <= tolerance;
}

int LearningRecord::occupied_bins() const {
  return static_cast<int>(
      std::count_if(coverage.begin(), coverage.end(), [](int c) { return c > 0; }));
}

double EventTime(const StageEvent& event) {
  return std::visit(
      [](const auto& e) -> double {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, PoseEvent>) {
          return e.position.t_s;
        } else {
          return e.t_s;
        }
      },
      event);
}

StageRunner::StageRunner(StageSpec stage, SonificationSpec spec,
                         GeometryConfig geometry, std::uint64_t session_seed,
                         double start_s, StageRunnerOptions options)
    : stage_(std::move(stage)),
      spec_(spec),
      geometry_(std::move(geometry)),
      session_seed_(session_seed),
      options_(options),
      next_trial_id_(options.first_trial_id),
      next_task_id_(options.first_task_id) {
  stage_.Validate();
  spec_.Validate();
  geometry_.Validate();
  task_start_s_ = start_s;
  break_until_s_ = start_s + stage_.break_minutes * 60.0;
}

std::vector<StageOutput> StageRunner::Start() {
  std::vector<StageOutput> out;
  if (stage_.break_minutes > 0.0) {
    state_ = State::kBreak;
    out.push_back(BreakStarted{break_until_s_});
  } else {
    BeginTask(task_start_s_, out);
  }
  return out;
}

void StageRunner::BeginTask(double t, std::vector<StageOutput>& out) {
  if (plan_index_ >= stage_.plan.size()) {
    Finish(true, out);
    return;
  }
  if (stage_.plan[plan_index_] == TaskKind::kLearning) {
    state_ = State::kLearning;
    learning_ = LearningRecord{};
    learning_.task_id = next_task_id_++;
    learning_.stage_id = stage_.stage_id;
    learning_.sonification = spec_.kind;
    task_start_s_ = t;
    last_pose_s_ = t;
    paused_ = false;
    out.push_back(LearningStarted{learning_.task_id});
    return;
  }
  trial_ = TrialRecord{};
  trial_.trial_id = next_trial_id_++;
  trial_.stage_id = stage_.stage_id;
  trial_.sonification = spec_.kind;
  trial_.prng_seed =
      DeriveSeed(session_seed_, stage_.stage_id, spec_.kind, positioning_index_++);
  const TargetDraw draw = GenerateTarget(stage_, geometry_, trial_.prng_seed);
  trial_.target = draw.target;
  trial_.resamples = draw.resamples;
  BeginPlayback(t, out);
}

void StageRunner::BeginPlayback(double t, std::vector<StageOutput>& out) {
  state_ = State::kPlaying;
  play_end_s_ = t + options_.target_seconds;
  PlayTargetRequest req;
  req.trial_id = trial_.trial_id;
  req.target = trial_.target;
  req.frame = MakeFrame(spec_, trial_.target.depth,
                        stage_.sonify_azimuth ? trial_.target.azimuth : std::nullopt, t);
  req.duration_s = options_.target_seconds;
  out.push_back(req);
}

void StageRunner::FinishLearning(double t, bool complete,
                                 std::vector<StageOutput>& out) {
  learning_.duration_s = std::max(0.0, t - task_start_s_);
  learning_.complete = complete;
  out.push_back(LearningDone{learning_});
  if (complete) ++learning_done_;
}

void StageRunner::CheckTimers(double t, std::vector<StageOutput>& out) {
  if (state_ == State::kBreak && t >= break_until_s_) {
    BeginTask(t, out);
  }
  if (state_ == State::kPlaying && t >= play_end_s_) {
    state_ = State::kAwaitingPlacement;
  }
  if (state_ == State::kLearning && !paused_ &&
      t - last_pose_s_ > options_.tracking_pause_s) {
    paused_ = true;
    ++learning_.pauses;
    out.push_back(TrackingPaused{t});
  }
}

void StageRunner::OnPose(const LivePosition& pos, std::vector<StageOutput>& out) {
  last_position_ = pos;
  if (state_ != State::kLearning) return;
  if (paused_) {
    paused_ = false;
    out.push_back(TrackingResumed{pos.t_s});
  }
  last_pose_s_ = pos.t_s;
  if (pos.tracking_lost) return;
  const int bin = std::clamp(static_cast<int>(pos.depth.value * kCoverageBins), 0,
                             kCoverageBins - 1);
  ++learning_.coverage[bin];
  out.push_back(LiveFrame{MakeFrame(
      spec_, pos.depth,
      stage_.sonify_azimuth ? std::optional<AzimuthDegrees>(pos.azimuth) : std::nullopt,
      pos.t_s)});
}

void StageRunner::OnConfirm(double t, std::vector<StageOutput>& out) {
  if (state_ == State::kPlaying) {
    if (trial_.replays == 0) {
      ++trial_.replays;
      out.push_back(ConfirmRejected{t, true, "target still playing"});
      BeginPlayback(t, out);
    } else {
      out.push_back(ConfirmRejected{t, false, "target still playing"});
    }
    return;
  }
  if (state_ != State::kAwaitingPlacement) {
    out.push_back(ConfirmRejected{t, false, "no placement pending"});
    return;
  }
  if (!last_position_) {
    out.push_back(ConfirmRejected{t, false, "no tracked position"});
    return;
  }
  SpatialTarget placed;
  placed.depth = {last_position_->depth_cm / 100.0};
  if (stage_.sonify_azimuth) placed.azimuth = last_position_->azimuth;
  trial_.placed = placed;
  trial_.response_time_s = t - play_end_s_;
  trial_.ComputeErrors();
  out.push_back(TrialDone{trial_});
  ++positioning_done_;
  ++plan_index_;
  BeginTask(t, out);
}

void StageRunner::OnAbort(double t, std::vector<StageOutput>& out) {
  if (state_ == State::kLearning) {
    FinishLearning(t, false, out);
  } else if (state_ == State::kPlaying || state_ == State::kAwaitingPlacement) {
    trial_.aborted = true;
    trial_.placed.reset();
    trial_.ComputeErrors();
    trial_.response_time_s = std::max(0.0, t - play_end_s_);
    out.push_back(TrialDone{trial_});
  }
  Finish(false, out);
}

void StageRunner::Finish(bool complete, std::vector<StageOutput>& out) {
  state_ = complete ? State::kDone : State::kAborted;
  StageEndRecord rec;
  rec.stage_id = stage_.stage_id;
  rec.sonification = spec_.kind;
  rec.complete = complete;
  rec.learning_count = learning_done_;
  rec.positioning_count = positioning_done_;
  out.push_back(StageDone{rec});
}

std::vector<StageOutput> StageRunner::Handle(const StageEvent& event) {
  std::vector<StageOutput> out;
  if (finished()) return out;
  const double t = EventTime(event);
  if (std::holds_alternative<AbortEvent>(event)) {
    OnAbort(t, out);
    return out;
  }
  CheckTimers(t, out);
  if (finished()) return out;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, PoseEvent>) {
          OnPose(e.position, out);
        } else if constexpr (std::is_same_v<E, ConfirmEvent>) {
          OnConfirm(e.t_s, out);
        } else if constexpr (std::is_same_v<E, EndLearningEvent>) {
          if (state_ == State::kLearning) {
            FinishLearning(e.t_s, true, out);
            ++plan_index_;
            BeginTask(e.t_s, out);
          }
        }
      },
      event);
  return out;
}

}  // namespace sonify
