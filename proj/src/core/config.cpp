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

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace sonify {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

Error BadValue(const std::string& key, const std::string& value) {
  return Error(ErrorCode::kConfig, "invalid value '" + value + "' for " + key);
}

double ToDouble(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto r = std::from_chars(value.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out)) throw BadValue(key, value);
  return out;
}

template <typename Int>
Int ToInt(const std::string& key, const std::string& value) {
  Int out = 0;
  const char* end = value.data() + value.size();
  const auto r = std::from_chars(value.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) throw BadValue(key, value);
  return out;
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw BadValue(key, value);
}

std::string Num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::vector<TablePoint> ParseTable(const std::string& key, const std::string& value) {
  std::vector<TablePoint> out;
  std::stringstream ss(value);
  std::string vertex;
  while (std::getline(ss, vertex, ';')) {
    vertex = Trim(vertex);
    if (vertex.empty()) continue;
    const auto comma = vertex.find(',');
    if (comma == std::string::npos) throw BadValue(key, value);
    out.push_back({ToDouble(key, Trim(vertex.substr(0, comma))),
                   ToDouble(key, Trim(vertex.substr(comma + 1)))});
  }
  return out;
}

}  // namespace

std::string_view AudioModeName(AudioMode mode) {
  return mode == AudioMode::kClientSynthesisFrames ? "client_synthesis_frames"
                                                   : "server_rendered_stream";
}

void ServiceConfig::Validate() const {
  if (frame_rate_hz < 10.0 || frame_rate_hz > 120.0) {
    throw Error(ErrorCode::kConfig, "frame rate must lie in [10, 120] Hz");
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kConfig, "port out of range");
}

SessionConfig::SessionConfig() {
  for (SonificationKind kind : kAllKinds) {
    specs[static_cast<int>(kind)] = SonificationSpec::Default(kind, sample_rate);
  }
}

void SessionConfig::Validate() const {
  for (const SonificationSpec& s : specs) {
    if (s.sample_rate != sample_rate) {
      throw Error(ErrorCode::kConfig, "spec sample rate differs from session rate");
    }
    try {
      s.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, std::string(KindName(s.kind)) + ": " + e.what());
    }
  }
  try {
    geometry.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("geometry: ") + e.what());
  }
  if (!(synth.volume > 0.0 && synth.volume <= 1.0)) {
    throw Error(ErrorCode::kConfig, "volume must lie in (0, 1]");
  }
  if (!(synth.reverb_wet_mix >= 0.0 && synth.reverb_wet_mix <= 1.0)) {
    throw Error(ErrorCode::kConfig, "reverb wet mix must lie in [0, 1]");
  }
  if (!(break_minutes >= 0.0) || !(target_seconds > 0.0) || !(tracking_timeout_s > 0.0)) {
    throw Error(ErrorCode::kConfig, "protocol timings must be positive");
  }
  service.Validate();
}

EnvLookup ProcessEnvironment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

void ApplySetting(SessionConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = Trim(raw);
  if (key == "sample_rate") {
    c.sample_rate = ToInt<int>(key, value);
    for (SonificationSpec& s : c.specs) s.sample_rate = c.sample_rate;
    return;
  }
  const auto dot = key.find('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string field = dot == std::string::npos ? key : key.substr(dot + 1);

  for (SonificationKind kind : kAllKinds) {
    if (section != KindName(kind)) continue;
    SonificationSpec& s = c.spec(kind);
    if (field == "p0") {
      s.p_at_0m = ToDouble(key, value);
    } else if (field == "p1") {
      s.p_at_1m = ToDouble(key, value);
    } else if (field == "carrier_hz") {
      s.carrier_hz = ToDouble(key, value);
    } else if (field == "quantize_semitones" && kind == SonificationKind::kFreq) {
      s.quantize_semitones = ToBool(key, value);
    } else {
      throw Error(ErrorCode::kConfig, "unknown config key " + key);
    }
    return;
  }

  if (section == "synth") {
    if (field == "phon") c.synth.phon = ToDouble(key, value);
    else if (field == "headroom_db") c.synth.headroom_db = ToDouble(key, value);
    else if (field == "volume") c.synth.volume = ToDouble(key, value);
    else if (field == "smoothing_ms") c.synth.smoothing_ms = ToDouble(key, value);
    else if (field == "noise_seed") c.synth.noise_seed = ToInt<std::uint64_t>(key, value);
    else if (field == "beep_gate_s") c.synth.beep_gate_s = ToDouble(key, value);
    else if (field == "reverb_wet_mix") c.synth.reverb_wet_mix = ToDouble(key, value);
    else throw Error(ErrorCode::kConfig, "unknown config key " + key);
  } else if (section == "geometry") {
    if (field == "box_edge_cm") c.geometry.box_edge_cm = ToDouble(key, value);
    else if (field == "depth_origin_cm") c.geometry.depth_origin_cm = ToDouble(key, value);
    else if (field == "table") c.geometry.table = ParseTable(key, value);
    else throw Error(ErrorCode::kConfig, "unknown config key " + key);
  } else if (section == "protocol") {
    if (field == "break_minutes") c.break_minutes = ToDouble(key, value);
    else if (field == "target_seconds") c.target_seconds = ToDouble(key, value);
    else if (field == "tracking_timeout_s") c.tracking_timeout_s = ToDouble(key, value);
    else throw Error(ErrorCode::kConfig, "unknown config key " + key);
  } else if (section == "service") {
    if (field == "address") {
      c.service.address = value;
    } else if (field == "port") {
      c.service.port = ToInt<int>(key, value);
    } else if (field == "frame_rate_hz") {
      c.service.frame_rate_hz = ToDouble(key, value);
    } else if (field == "audio_mode") {
      if (value == "client_synthesis_frames") {
        c.service.audio_mode = AudioMode::kClientSynthesisFrames;
      } else if (value == "server_rendered_stream") {
        c.service.audio_mode = AudioMode::kServerRenderedStream;
      } else {
        throw BadValue(key, value);
      }
    } else if (field == "log_path") {
      c.service.log_path = value;
    } else {
      throw Error(ErrorCode::kConfig, "unknown config key " + key);
    }
  } else {
    throw Error(ErrorCode::kConfig, "unknown config key " + key);
  }
}

void ApplyConfigText(SessionConfig& config, const std::string& text,
                     const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  origin + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      ApplySetting(config, Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

SessionConfig LoadConfig(const std::optional<std::string>& path, const EnvLookup& env) {
  SessionConfig config;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + *path);
    std::stringstream buf;
    buf << in.rdbuf();
    ApplyConfigText(config, buf.str(), *path);
  }
  if (env) {
    for (const auto& [key, unused] : ConfigSettings(config)) {
      std::string name = "SONIFY_" + key;
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) {
        return ch == '.' ? '_' : static_cast<char>(std::toupper(ch));
      });
      if (auto v = env(name)) ApplySetting(config, key, *v);
    }
  }
  config.Validate();
  return config;
}

std::map<std::string, std::string> ConfigSettings(const SessionConfig& c) {
  std::map<std::string, std::string> out;
  out["sample_rate"] = std::to_string(c.sample_rate);
  for (SonificationKind kind : kAllKinds) {
    const SonificationSpec& s = c.spec(kind);
    const std::string prefix(KindName(kind));
    out[prefix + ".p0"] = Num(s.p_at_0m);
    out[prefix + ".p1"] = Num(s.p_at_1m);
    out[prefix + ".carrier_hz"] = Num(s.carrier_hz);
  }
  out["freq.quantize_semitones"] =
      c.spec(SonificationKind::kFreq).quantize_semitones ? "true" : "false";
  out["synth.phon"] = Num(c.synth.phon);
  out["synth.headroom_db"] = Num(c.synth.headroom_db);
  out["synth.volume"] = Num(c.synth.volume);
  out["synth.smoothing_ms"] = Num(c.synth.smoothing_ms);
  out["synth.noise_seed"] = std::to_string(c.synth.noise_seed);
  out["synth.beep_gate_s"] = Num(c.synth.beep_gate_s);
  out["synth.reverb_wet_mix"] = Num(c.synth.reverb_wet_mix);
  out["geometry.box_edge_cm"] = Num(c.geometry.box_edge_cm);
  out["geometry.depth_origin_cm"] = Num(c.geometry.depth_origin_cm);
  std::string table;
  for (const TablePoint& p : c.geometry.table) {
    if (!table.empty()) table += "; ";
    table += Num(p.x_cm) + "," + Num(p.depth_cm);
  }
  out["geometry.table"] = table;
  out["protocol.break_minutes"] = Num(c.break_minutes);
  out["protocol.target_seconds"] = Num(c.target_seconds);
  out["protocol.tracking_timeout_s"] = Num(c.tracking_timeout_s);
  out["service.address"] = c.service.address;
  out["service.port"] = std::to_string(c.service.port);
  out["service.frame_rate_hz"] = Num(c.service.frame_rate_hz);
  out["service.audio_mode"] = std::string(AudioModeName(c.service.audio_mode));
  out["service.log_path"] = c.service.log_path;
  return out;
}

}  // namespace sonify
