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

#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "error.hpp"
#include "protocol.hpp"

namespace sonify {

namespace {

constexpr double kMaxPlacementAzimuth = 89.9;

struct Placement {
  double depth_cm = 0.0;
  double azimuth_deg = 0.0;
};

Placement Place(const ParticipantModel& model, const SpatialTarget& target,
                std::mt19937_64& rng) {
  Placement p;
  const double az = target.azimuth ? target.azimuth->value : 0.0;
  switch (model.kind) {
    case ParticipantModel::Kind::kPerfect:
      p.depth_cm = target.depth.value * 100.0;
      p.azimuth_deg = az;
      break;
    case ParticipantModel::Kind::kGaussian:
      p.depth_cm = target.depth.value * 100.0 + model.sigma_cm * StandardNormal(rng);
      p.azimuth_deg = az + model.sigma_deg * StandardNormal(rng);
      break;
    case ParticipantModel::Kind::kUniform:
      p.depth_cm = 100.0 * Uniform01(rng);
      p.azimuth_deg = -90.0 + 180.0 * Uniform01(rng);
      break;
  }
  p.azimuth_deg = std::clamp(p.azimuth_deg, -kMaxPlacementAzimuth, kMaxPlacementAzimuth);
  return p;
}

TablePoint ToTable(const Placement& p, bool with_azimuth) {
  if (!with_azimuth) return {0.0, p.depth_cm};
  const auto x = TableXForTarget(p.depth_cm, {p.azimuth_deg});
  return {x.value_or(0.0), p.depth_cm};
}

}  // namespace

ParticipantModel ParticipantModel::Parse(const std::string& text) {
  ParticipantModel m;
  if (text == "perfect") {
    m.kind = Kind::kPerfect;
  } else if (text == "uniform") {
    m.kind = Kind::kUniform;
  } else if (text == "gaussian") {
    m.kind = Kind::kGaussian;
  } else if (text.rfind("gaussian:", 0) == 0) {
    m.kind = Kind::kGaussian;
    try {
      std::size_t used = 0;
      m.sigma_cm = std::stod(text.substr(9), &used);
      if (used != text.size() - 9) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad participant model " + text);
    }
    if (!(m.sigma_cm >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma must be non-negative");
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "participant model must be perfect, uniform or gaussian[:SIGMA], got " + text);
  }
  return m;
}

std::string ParticipantModel::Name() const {
  switch (kind) {
    case Kind::kPerfect: return "perfect";
    case Kind::kUniform: return "uniform";
    case Kind::kGaussian: break;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "gaussian:%g", sigma_cm);
  return buf;
}

double StandardNormal(std::mt19937_64& rng) {
  const double u1 = 1.0 - Uniform01(rng);  // (0, 1]
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

MarkerPose PoseForTablePoint(TablePoint p, double t_s, const GeometryConfig& geometry) {
  return {t_s, p.x_cm, 0.0, geometry.depth_origin_cm - p.depth_cm - geometry.box_edge_cm / 2.0};
}

SessionLog SimulateSession(const SessionConfig& config, const SimulationOptions& options,
                           LogWriter* writer) {
  if (!(options.pose_rate_hz > 0.0) || !(options.learning_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pose rate and learning time must be positive");
  }
  SessionHeader header = MakeHeader(config, options.participant_id, options.seed);
  header.notes = "simulated participant (" + options.model.Name() + ")";
  const std::vector<SonificationKind> kinds =
      options.kinds.empty() ? header.sonification_order : options.kinds;
  Session session(config, header, writer);
  std::mt19937_64 rng(options.seed ^ 0x7061727469636970ULL);
  const GeometryConfig& geom = config.geometry;
  const double dt = 1.0 / options.pose_rate_hz;

  double t = 0.0;
  for (int stage_id : options.stages) {
    for (SonificationKind kind : kinds) {
      auto outputs = session.BeginStage(stage_id, kind, t);
      const bool azimuth = StageSpec::ForStage(stage_id).sonify_azimuth;
      SpatialTarget current_target;
      while (session.stage_running()) {
        const StageRunner& runner = *session.runner();
        std::optional<double> break_until;
        for (const StageOutput& o : outputs) {
          if (const auto* b = std::get_if<BreakStarted>(&o)) break_until = b->until_s;
          if (const auto* r = std::get_if<PlayTargetRequest>(&o)) current_target = r->target;
        }
        outputs.clear();
        switch (runner.state()) {
          case StageRunner::State::kBreak: {
            t = break_until.value_or(t + 1.0);
            outputs = session.Handle(TickEvent{t});
            break;
          }
          case StageRunner::State::kLearning: {
            // Sweep the box near to far and back, drifting sideways when
            // azimuth is encoded.
            const int n = static_cast<int>(std::lround(options.learning_seconds * options.pose_rate_hz));
            for (int i = 0; i < n; ++i) {
              const double phase = static_cast<double>(i) / std::max(1, n - 1);
              const double depth_cm = 100.0 * (1.0 - std::abs(2.0 * phase - 1.0));
              const double x_cm = azimuth ? 50.0 * std::sin(2.0 * std::numbers::pi * phase) : 0.0;
              t += dt;
              const MarkerPose pose = PoseForTablePoint({x_cm, depth_cm}, t, geom);
              session.Handle(PoseEvent{PositionFromPose(pose, geom)});
            }
            t += dt;
            outputs = session.Handle(EndLearningEvent{t});
            break;
          }
          case StageRunner::State::kPlaying:
          case StageRunner::State::kAwaitingPlacement: {
            t = std::max(t, runner.playback_end_s());
            t += 2.0 + 4.0 * Uniform01(rng);
            const Placement p = Place(options.model, current_target, rng);
            const MarkerPose pose = PoseForTablePoint(ToTable(p, azimuth), t, geom);
            session.Handle(PoseEvent{PositionFromPose(pose, geom)});
            outputs = session.Handle(ConfirmEvent{t});
            break;
          }
          case StageRunner::State::kDone:
          case StageRunner::State::kAborted:
            break;
        }
      }
      t += 1.0;
    }
  }
  return session.log();
}

}  // namespace sonify
