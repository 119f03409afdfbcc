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
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "session.hpp"
#include "session_log.hpp"

namespace sonify {

// How a virtual participant places the box after hearing a target.
struct ParticipantModel {
  enum class Kind { kPerfect, kGaussian, kUniform };
  Kind kind = Kind::kGaussian;
  double sigma_cm = 10.0;   // depth error spread (gaussian)
  double sigma_deg = 10.0;  // azimuth error spread (gaussian)

  // "perfect", "uniform", "gaussian" or "gaussian:SIGMA_CM".
  static ParticipantModel Parse(const std::string& text);
  std::string Name() const;
};

// Standard normal deviate from two uniforms (Box-Muller); portable, unlike
// std::normal_distribution.
double StandardNormal(std::mt19937_64& rng);

// Tracker pose of a box resting at table point p.
MarkerPose PoseForTablePoint(TablePoint p, double t_s, const GeometryConfig& geometry);

struct SimulationOptions {
  std::string participant_id = "sim-001";
  std::uint64_t seed = 1;
  std::vector<int> stages = {1, 2, 3};
  // Empty: all five in the session's seeded order.
  std::vector<SonificationKind> kinds;
  ParticipantModel model;
  double learning_seconds = 20.0;
  double pose_rate_hz = 10.0;
};

// Runs the requested stages headless on a virtual clock. Output depends
// only on the config and options.
SessionLog SimulateSession(const SessionConfig& config, const SimulationOptions& options,
                           LogWriter* writer = nullptr);

}  // namespace sonify
