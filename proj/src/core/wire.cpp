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

#include "wire.hpp"

#include <cmath>

#include "error.hpp"
#include "json.hpp"

namespace sonify {

namespace {

using Json = nlohmann::ordered_json;

double Number(const Json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_number()) {
    throw WireError(kWireMalformed, std::string("field '") + field + "' must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw WireError(kWireMalformed, std::string("field '") + field + "' must be finite");
  }
  return v;
}

Json FrameJson(const RenderFrame& f) {
  Json j;
  j["kind"] = std::string(KindName(f.kind));
  j["param"] = f.param;
  j["pan"] = f.pan;
  j["t"] = f.timestamp;
  return j;
}

}  // namespace

std::string_view RoleName(ClientRole role) {
  switch (role) {
    case ClientRole::kParticipant: return "participant";
    case ClientRole::kOperator: return "operator";
    case ClientRole::kObserver: return "observer";
  }
  return "unknown";
}

ClientMessage ParseClientMessage(const std::string& text,
                                 std::optional<std::uint64_t> last_seq) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw WireError(kWireMalformed, std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) throw WireError(kWireMalformed, "message must be an object");
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) {
    throw WireError(kWireMalformed, "missing 'type'");
  }
  const auto seq_it = j.find("seq");
  if (seq_it == j.end() || !seq_it->is_number_unsigned()) {
    throw WireError(kWireMalformed, "missing or negative 'seq'");
  }
  ClientMessage msg;
  msg.seq = seq_it->get<std::uint64_t>();
  msg.timestamp = Number(j, "timestamp");
  if (last_seq && msg.seq <= *last_seq) {
    throw WireError(kWireSequence, "seq " + std::to_string(msg.seq) +
                                       " does not exceed " + std::to_string(*last_seq));
  }
  const std::string type = type_it->get<std::string>();
  if (type == "hello") {
    const std::string role = j.value("role", "");
    HelloMsg h;
    if (role == "participant") {
      h.role = ClientRole::kParticipant;
    } else if (role == "operator") {
      h.role = ClientRole::kOperator;
    } else if (role == "observer") {
      h.role = ClientRole::kObserver;
    } else {
      throw WireError(kWireMalformed, "role must be participant, operator or observer");
    }
    msg.payload = h;
  } else if (type == "pose") {
    msg.payload = PoseMsg{Number(j, "t"), Number(j, "x_cm"), Number(j, "z_cm")};
  } else if (type == "confirm") {
    msg.payload = ConfirmMsg{};
  } else if (type == "start_stage") {
    StartStageMsg s;
    const auto stage = j.find("stage");
    if (stage == j.end() || !stage->is_number_integer()) {
      throw WireError(kWireMalformed, "field 'stage' must be an integer");
    }
    s.stage = stage->get<int>();
    if (s.stage < 1 || s.stage > 3) throw WireError(kWireMalformed, "stage must be 1, 2 or 3");
    const auto kind = j.find("sonification");
    if (kind == j.end() || !kind->is_string()) {
      throw WireError(kWireMalformed, "field 'sonification' must be a string");
    }
    try {
      s.sonification = ParseKind(kind->get<std::string>());
    } catch (const Error& e) {
      throw WireError(kWireMalformed, e.what());
    }
    const auto seed = j.find("seed");
    if (seed != j.end() && !seed->is_null()) {
      if (!seed->is_number_unsigned()) {
        throw WireError(kWireMalformed, "field 'seed' must be a non-negative integer");
      }
      s.seed = seed->get<std::uint64_t>();
    }
    msg.payload = s;
  } else if (type == "end_learning") {
    msg.payload = EndLearningMsg{};
  } else if (type == "abort") {
    msg.payload = AbortMsg{};
  } else {
    throw WireError(kWireUnknownType, "unknown message type '" + type + "'");
  }
  return msg;
}

MarkerPose PoseFromMessage(const PoseMsg& pose) {
  return {pose.t, pose.x_cm, 0.0, pose.z_cm};
}

std::string FrameBody(const RenderFrame& frame) {
  Json j;
  j["type"] = "frame";
  j["kind"] = std::string(KindName(frame.kind));
  j["param"] = frame.param;
  j["pan"] = frame.pan;
  return j.dump();
}

std::string PlayTargetBody(const std::vector<RenderFrame>& frames, double duration_s,
                           bool conceal) {
  Json j;
  j["type"] = "play_target";
  Json arr = Json::array();
  for (const RenderFrame& f : frames) arr.push_back(FrameJson(f));
  j["frames"] = arr;
  j["duration_s"] = duration_s;
  j["conceal"] = conceal;
  return j.dump();
}

std::string TrialResultBody(const TrialRecord& record) {
  Json j;
  j["type"] = "trial_result";
  j["record"] = Json::parse(SerializeRecord(record));
  return j.dump();
}

std::string StageEventBody(const std::string& event, int stage,
                           SonificationKind sonification, double value) {
  Json j;
  j["type"] = "stage_event";
  j["event"] = event;
  j["stage"] = stage;
  j["sonification"] = std::string(KindName(sonification));
  j["value"] = value;
  return j.dump();
}

std::string ErrorBody(const std::string& code, const std::string& detail) {
  Json j;
  j["type"] = "error";
  j["code"] = code;
  j["detail"] = detail;
  return j.dump();
}

std::string EncodeServerMessage(const std::string& body, std::uint64_t seq,
                                double timestamp) {
  Json j = Json::parse(body);
  j["seq"] = seq;
  j["timestamp"] = timestamp;
  return j.dump();
}

std::string EncodeClientMessage(const ClientPayload& payload, std::uint64_t seq,
                                double timestamp) {
  Json j;
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HelloMsg>) {
          j["type"] = "hello";
          j["role"] = std::string(RoleName(p.role));
        } else if constexpr (std::is_same_v<P, PoseMsg>) {
          j["type"] = "pose";
          j["t"] = p.t;
          j["x_cm"] = p.x_cm;
          j["z_cm"] = p.z_cm;
        } else if constexpr (std::is_same_v<P, ConfirmMsg>) {
          j["type"] = "confirm";
        } else if constexpr (std::is_same_v<P, StartStageMsg>) {
          j["type"] = "start_stage";
          j["stage"] = p.stage;
          j["sonification"] = std::string(KindName(p.sonification));
          if (p.seed) j["seed"] = *p.seed;
        } else if constexpr (std::is_same_v<P, EndLearningMsg>) {
          j["type"] = "end_learning";
        } else {
          j["type"] = "abort";
        }
      },
      payload);
  j["seq"] = seq;
  j["timestamp"] = timestamp;
  return j.dump();
}

}  // namespace sonify
