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
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "mapping.hpp"
#include "session_log.hpp"
#include "synth.hpp"

namespace sonify {

// Text messages exchanged with clients: one JSON object per WebSocket text
// frame, each with `type`, `seq` (strictly increasing per sender and
// connection) and `timestamp` (sender clock, seconds).

enum class ClientRole { kParticipant, kOperator, kObserver };
std::string_view RoleName(ClientRole role);

struct HelloMsg { ClientRole role = ClientRole::kParticipant; };
// Marker position: x and z in the tracker frame, centimeters.
struct PoseMsg { double t = 0.0; double x_cm = 0.0; double z_cm = 0.0; };
struct ConfirmMsg {};
struct StartStageMsg {
  int stage = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  std::optional<std::uint64_t> seed;
};
struct EndLearningMsg {};
struct AbortMsg {};

using ClientPayload =
    std::variant<HelloMsg, PoseMsg, ConfirmMsg, StartStageMsg, EndLearningMsg, AbortMsg>;

struct ClientMessage {
  std::uint64_t seq = 0;
  double timestamp = 0.0;
  ClientPayload payload;
};

// Rejection reasons, sent back as error{code, detail}.
inline constexpr const char* kWireMalformed = "malformed";
inline constexpr const char* kWireUnknownType = "unknown_type";
inline constexpr const char* kWireSequence = "bad_sequence";
inline constexpr const char* kWireState = "invalid_state";
inline constexpr const char* kWireForbidden = "forbidden";

class WireError : public std::runtime_error {
 public:
  WireError(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Parses one client message; `last_seq` is the previous accepted sequence
// number on the connection, if any. Throws WireError.
ClientMessage ParseClientMessage(const std::string& text,
                                 std::optional<std::uint64_t> last_seq);

MarkerPose PoseFromMessage(const PoseMsg& pose);

// Server-to-client bodies; EncodeServerMessage adds seq and timestamp.
std::string FrameBody(const RenderFrame& frame);
std::string PlayTargetBody(const std::vector<RenderFrame>& frames, double duration_s,
                           bool conceal);
std::string TrialResultBody(const TrialRecord& record);
std::string StageEventBody(const std::string& event, int stage,
                           SonificationKind sonification, double value);
std::string ErrorBody(const std::string& code, const std::string& detail);

// Inserts "seq" and "timestamp" into a body produced above.
std::string EncodeServerMessage(const std::string& body, std::uint64_t seq, double timestamp);

// Client-side helpers (tests, tools).
std::string EncodeClientMessage(const ClientPayload& payload, std::uint64_t seq,
                                double timestamp);

}  // namespace sonify
