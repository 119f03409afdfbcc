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

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "audio.hpp"
#include "geometry.hpp"
#include "mapping.hpp"
#include "synth.hpp"

namespace sonify {

enum class TaskKind { kLearning, kPositioning };

struct StageSpec {
  int stage_id = 1;
  std::vector<TaskKind> plan;
  bool sonify_azimuth = false;
  double break_minutes = 0.0;

  // Stage 1: 3 x [learning, 5 positioning]. Stage 2: [learning,
  // 5 positioning] with azimuth. Stage 3: 5 positioning after a break.
  static StageSpec ForStage(int stage_id, double break_minutes = 10.0);

  int learning_count() const;
  int positioning_count() const;
  void Validate() const;
};

// Uniform double in [0, 1) from the top 53 bits; identical on every
// platform, unlike std::uniform_real_distribution.
double Uniform01(std::mt19937_64& rng);

// Per-trial seed derived from the session seed (SplitMix64 mixing).
std::uint64_t DeriveSeed(std::uint64_t session_seed, int stage_id,
                         SonificationKind kind, int index);

struct TargetDraw {
  SpatialTarget target;
  int resamples = 0;  // rejected draws before acceptance
};

// Depth uniform on [0, 1] m; in azimuth stages also azimuth uniform on
// [-90, 90] degrees, redrawn until the point lies on the table. Throws
// Error(kConfig) after 1000 rejections.
TargetDraw GenerateTarget(const StageSpec& stage, const GeometryConfig& geometry,
                          std::mt19937_64& rng);
TargetDraw GenerateTarget(const StageSpec& stage, const GeometryConfig& geometry,
                          std::uint64_t seed);

inline constexpr double kTargetSoundSeconds = 2.0;

// Constant-parameter render of the target; centered unless the target
// carries an azimuth.
AudioBlock PlayTarget(const SpatialTarget& target, const SonificationSpec& spec,
                      const SynthOptions& options = {},
                      double duration_s = kTargetSoundSeconds);

struct TrialRecord {
  int trial_id = 0;
  int stage_id = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  SpatialTarget target;
  std::optional<SpatialTarget> placed;  // absent when aborted
  double abs_depth_error_cm = 0.0;
  std::optional<double> abs_azimuth_error_deg;
  double response_time_s = 0.0;
  std::uint64_t prng_seed = 0;
  int resamples = 0;
  int replays = 0;
  bool aborted = false;

  // Fills the absolute errors from target and placement.
  void ComputeErrors();
  // True when the stored errors equal a recomputation.
  bool ErrorsConsistent(double tolerance = 1e-9) const;
};

inline constexpr int kCoverageBins = 10;

struct LearningRecord {
  int task_id = 0;
  int stage_id = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  double duration_s = 0.0;
  std::array<int, kCoverageBins> coverage{};  // pose counts per 10 cm of depth
  int pauses = 0;
  bool complete = true;

  int occupied_bins() const;
};

struct StageEndRecord {
  int stage_id = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  bool complete = true;
  int learning_count = 0;
  int positioning_count = 0;
};

// Events the stage state machine consumes, in time order.
struct PoseEvent { LivePosition position; };
struct ConfirmEvent { double t_s = 0.0; };
struct EndLearningEvent { double t_s = 0.0; };
struct TickEvent { double t_s = 0.0; };
struct AbortEvent { double t_s = 0.0; };
using StageEvent =
    std::variant<PoseEvent, ConfirmEvent, EndLearningEvent, TickEvent, AbortEvent>;

double EventTime(const StageEvent& event);

// Effects the state machine asks the host to carry out or record.
struct BreakStarted { double until_s = 0.0; };
struct LearningStarted { int task_id = 0; };
struct LiveFrame { RenderFrame frame; };
struct TrackingPaused { double t_s = 0.0; };
struct TrackingResumed { double t_s = 0.0; };
struct PlayTargetRequest {
  int trial_id = 0;
  SpatialTarget target;
  RenderFrame frame;
  double duration_s = kTargetSoundSeconds;
  bool conceal = true;
};
struct ConfirmRejected {
  double t_s = 0.0;
  bool replayed = false;
  const char* reason = "";
};
struct LearningDone { LearningRecord record; };
struct TrialDone { TrialRecord record; };
struct StageDone { StageEndRecord record; };
using StageOutput =
    std::variant<BreakStarted, LearningStarted, LiveFrame, TrackingPaused,
                 TrackingResumed, PlayTargetRequest, ConfirmRejected,
                 LearningDone, TrialDone, StageDone>;

struct StageRunnerOptions {
  double target_seconds = kTargetSoundSeconds;
  double tracking_pause_s = 5.0;
  int first_trial_id = 1;
  int first_task_id = 1;
};

// Single-threaded, event-driven run of one stage for one sonification.
// Time comes from the events, so the same machine serves live sessions
// (wall clock) and simulations (virtual clock).
class StageRunner {
 public:
  enum class State { kBreak, kLearning, kPlaying, kAwaitingPlacement, kDone, kAborted };

  StageRunner(StageSpec stage, SonificationSpec spec, GeometryConfig geometry,
              std::uint64_t session_seed, double start_s,
              StageRunnerOptions options = {});

  // Emits the opening outputs (break or first task). Call once.
  std::vector<StageOutput> Start();
  std::vector<StageOutput> Handle(const StageEvent& event);

  State state() const { return state_; }
  bool finished() const { return state_ == State::kDone || state_ == State::kAborted; }
  const StageSpec& stage() const { return stage_; }
  const SonificationSpec& spec() const { return spec_; }
  std::size_t plan_index() const { return plan_index_; }
  double playback_end_s() const { return play_end_s_; }
  int next_trial_id() const { return next_trial_id_; }
  int next_task_id() const { return next_task_id_; }

 private:
  void BeginTask(double t, std::vector<StageOutput>& out);
  void BeginPlayback(double t, std::vector<StageOutput>& out);
  void FinishLearning(double t, bool complete, std::vector<StageOutput>& out);
  void CheckTimers(double t, std::vector<StageOutput>& out);
  void OnPose(const LivePosition& pos, std::vector<StageOutput>& out);
  void OnConfirm(double t, std::vector<StageOutput>& out);
  void OnAbort(double t, std::vector<StageOutput>& out);
  void Finish(bool complete, std::vector<StageOutput>& out);

  StageSpec stage_;
  SonificationSpec spec_;
  GeometryConfig geometry_;
  std::uint64_t session_seed_;
  StageRunnerOptions options_;
  State state_ = State::kBreak;
  double break_until_s_ = 0.0;
  std::size_t plan_index_ = 0;
  int positioning_index_ = 0;
  int next_trial_id_;
  int next_task_id_;
  int learning_done_ = 0;
  int positioning_done_ = 0;

  // Learning task.
  LearningRecord learning_;
  double task_start_s_ = 0.0;
  double last_pose_s_ = 0.0;
  bool paused_ = false;

  // Positioning task.
  TrialRecord trial_;
  double play_end_s_ = 0.0;
  std::optional<LivePosition> last_position_;
};

// Serialized event queue shared by concurrent producers and the single
// state-machine consumer.
template <typename T>
class EventQueue {
 public:
  void Push(T item) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  std::optional<T> TryPop() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

  template <typename Duration>
  std::optional<T> PopFor(Duration timeout) {
    std::unique_lock<std::mutex> lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [this] { return !items_.empty(); })) {
      return std::nullopt;
    }
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<T> items_;
};

}  // namespace sonify
