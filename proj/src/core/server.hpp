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
#include <memory>
#include <string>

#include "config.hpp"

namespace sonify {

// Live experiment service. Clients speak the wire protocol over WebSocket
// text frames. One I/O thread runs the connections and the frame tick;
// one session thread owns the protocol state and consumes their events
// from a single queue; the log writer serializes appends.
class Server {
 public:
  Server(SessionConfig config, std::string participant_id, std::uint64_t seed);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts both threads. Port 0 picks a free port. Throws
  // Error(kNetwork) when the address cannot be bound.
  void Start();
  unsigned short port() const;
  const std::filesystem::path& log_path() const;

  // Makes Wait() return on SIGINT or SIGTERM. Call before Start().
  void HandleSignals();
  // Blocks until a signal or RequestStop().
  void Wait();
  void RequestStop();
  // Aborts a running stage (logged incomplete), closes clients, joins.
  void Stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace sonify
