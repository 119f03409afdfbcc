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

#include "server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "error.hpp"
#include "json.hpp"
#include "protocol.hpp"
#include "session.hpp"
#include "session_log.hpp"
#include "synth.hpp"
#include "wire.hpp"

namespace sonify {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

struct Incoming {
  std::uint64_t connection = 0;
  ClientMessage message;
};
struct Disconnected {
  std::uint64_t connection = 0;
  ClientRole role = ClientRole::kObserver;
};
struct Tick {};
struct Shutdown {};
using ServerEvent = std::variant<Incoming, Disconnected, Tick, Shutdown>;

constexpr unsigned kToParticipant = 1;
constexpr unsigned kToOperator = 2;
constexpr unsigned kToObserver = 4;
constexpr unsigned kToAll = 7;

unsigned RoleBit(ClientRole role) {
  switch (role) {
    case ClientRole::kParticipant: return kToParticipant;
    case ClientRole::kOperator: return kToOperator;
    case ClientRole::kObserver: return kToObserver;
  }
  return 0;
}

}  // namespace

class Connection;

struct Server::Impl {
  Impl(SessionConfig cfg, std::string participant, std::uint64_t seed_in)
      : config(std::move(cfg)),
        participant_id(std::move(participant)),
        seed(seed_in),
        acceptor(ioc),
        tick_timer(ioc),
        signals(ioc) {
    config.Validate();
  }

  double Now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch).count();
  }

  // I/O thread.
  void Accept();
  void ScheduleTick();
  void OnMessage(const std::shared_ptr<Connection>& c, const std::string& text);
  void OnClosed(std::uint64_t id);
  void Deliver(unsigned roles, const std::string& body);
  void DeliverBinary(unsigned roles, std::vector<std::int16_t> pcm);
  void DeliverTo(std::uint64_t id, const std::string& body);

  // Session thread.
  void SessionLoop();
  void OnIncoming(const Incoming& in);
  void OnTick();
  void Dispatch(const std::vector<StageOutput>& outputs, std::uint64_t origin);
  void ReplyError(std::uint64_t id, const std::string& code, const std::string& detail) {
    net::post(ioc, [this, id, body = ErrorBody(code, detail)] { DeliverTo(id, body); });
  }
  void Broadcast(unsigned roles, std::string body) {
    net::post(ioc, [this, roles, body = std::move(body)] { Deliver(roles, body); });
  }

  SessionConfig config;
  std::string participant_id;
  std::uint64_t seed;
  std::chrono::steady_clock::time_point epoch = std::chrono::steady_clock::now();

  net::io_context ioc;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
  tcp::acceptor acceptor;
  net::steady_timer tick_timer;
  net::signal_set signals;
  bool handle_signals = false;
  std::map<std::uint64_t, std::shared_ptr<Connection>> connections;
  std::uint64_t next_connection = 1;
  std::thread io_thread;

  EventQueue<ServerEvent> queue;
  std::thread session_thread;
  std::unique_ptr<LogWriter> writer;
  std::unique_ptr<Session> session;
  std::optional<RenderFrame> live_frame;  // session thread
  std::unique_ptr<StreamingEngine> stream;

  std::filesystem::path log_file;
  unsigned short bound_port = 0;
  bool started = false;
  bool stopped = false;

  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stop_requested = false;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Server::Impl* server, std::uint64_t id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  void Run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        self->server_->OnClosed(self->id_);
        return;
      }
      self->Read();
    });
  }

  void Send(const std::string& body) {
    if (closed_) return;
    outbox_.push_back({EncodeServerMessage(body, ++out_seq_, server_->Now()), true});
    if (outbox_.size() == 1) Write();
  }

  void SendBinary(const std::vector<std::int16_t>& pcm) {
    if (closed_) return;
    std::string bytes(reinterpret_cast<const char*>(pcm.data()), pcm.size() * sizeof(std::int16_t));
    outbox_.push_back({std::move(bytes), false});
    if (outbox_.size() == 1) Write();
  }

  void Close() {
    if (closed_) return;
    closed_ = true;
    ws_.async_close(websocket::close_code::going_away,
                    [self = shared_from_this()](beast::error_code) {});
  }

  std::uint64_t id() const { return id_; }
  std::optional<ClientRole> role;
  std::optional<std::uint64_t> last_seq;

 private:
  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->server_->OnClosed(self->id_);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (!self->ws_.got_text()) {
        self->Send(ErrorBody(kWireMalformed, "binary messages are not accepted"));
      } else {
        self->server_->OnMessage(self, text);
      }
      self->Read();
    });
  }

  void Write() {
    ws_.text(outbox_.front().second);
    ws_.async_write(net::buffer(outbox_.front().first),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->outbox_.clear();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->Write();
                    });
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::pair<std::string, bool>> outbox_;
  Server::Impl* server_;
  std::uint64_t id_;
  std::uint64_t out_seq_ = 0;
  bool closed_ = false;
};

void Server::Impl::Accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto c = std::make_shared<Connection>(std::move(socket), this, next_connection++);
    connections[c->id()] = c;
    c->Run();
    Accept();
  });
}

void Server::Impl::ScheduleTick() {
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config.service.frame_rate_hz));
  tick_timer.expires_at(tick_timer.expiry() + period);
  tick_timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    queue.Push(Tick{});
    ScheduleTick();
  });
}

void Server::Impl::OnMessage(const std::shared_ptr<Connection>& c, const std::string& text) {
  ClientMessage msg;
  try {
    msg = ParseClientMessage(text, c->last_seq);
  } catch (const WireError& e) {
    c->Send(ErrorBody(e.code(), e.what()));
    return;
  }
  c->last_seq = msg.seq;
  if (const auto* hello = std::get_if<HelloMsg>(&msg.payload)) {
    if (hello->role == ClientRole::kParticipant) {
      for (const auto& [id, other] : connections) {
        if (id != c->id() && other->role == ClientRole::kParticipant) {
          c->Send(ErrorBody(kWireForbidden, "a participant is already connected"));
          return;
        }
      }
    }
    c->role = hello->role;
    nlohmann::ordered_json ack;
    ack["type"] = "hello";
    ack["role"] = std::string(RoleName(hello->role));
    ack["participant_id"] = participant_id;
    c->Send(ack.dump());
    return;
  }
  if (!c->role) {
    c->Send(ErrorBody(kWireState, "send hello first"));
    return;
  }
  if (*c->role == ClientRole::kObserver) {
    c->Send(ErrorBody(kWireForbidden, "observers may not send commands"));
    return;
  }
  queue.Push(Incoming{c->id(), std::move(msg)});
}

void Server::Impl::OnClosed(std::uint64_t id) {
  const auto it = connections.find(id);
  if (it == connections.end()) return;
  const std::optional<ClientRole> role = it->second->role;
  connections.erase(it);
  if (role) queue.Push(Disconnected{id, *role});
}

void Server::Impl::Deliver(unsigned roles, const std::string& body) {
  for (const auto& [id, c] : connections) {
    if (c->role && (RoleBit(*c->role) & roles)) c->Send(body);
  }
}

void Server::Impl::DeliverBinary(unsigned roles, std::vector<std::int16_t> pcm) {
  for (const auto& [id, c] : connections) {
    if (c->role && (RoleBit(*c->role) & roles)) c->SendBinary(pcm);
  }
}

void Server::Impl::DeliverTo(std::uint64_t id, const std::string& body) {
  const auto it = connections.find(id);
  if (it != connections.end()) it->second->Send(body);
}

void Server::Impl::SessionLoop() {
  for (;;) {
    const auto event = queue.PopFor(std::chrono::milliseconds(200));
    if (!event) continue;
    try {
      if (std::holds_alternative<Shutdown>(*event)) {
        if (session->stage_running()) Dispatch(session->Handle(AbortEvent{Now()}), 0);
        return;
      }
      if (const auto* in = std::get_if<Incoming>(&*event)) {
        OnIncoming(*in);
      } else if (const auto* d = std::get_if<Disconnected>(&*event)) {
        if (d->role == ClientRole::kParticipant && session->stage_running()) {
          Dispatch(session->Handle(AbortEvent{Now()}), 0);
        }
      } else {
        OnTick();
      }
    } catch (const std::exception& e) {
      // A failed log write or config fault must not kill the service.
      Broadcast(kToOperator, ErrorBody("internal", e.what()));
    }
  }
}

void Server::Impl::OnIncoming(const Incoming& in) {
  const double now = Now();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PoseMsg>) {
          if (!session->stage_running()) return;
          LivePosition pos = PositionFromPose(PoseFromMessage(p), config.geometry);
          pos.t_s = now;
          Dispatch(session->Handle(PoseEvent{pos}), in.connection);
        } else if constexpr (std::is_same_v<P, ConfirmMsg>) {
          if (!session->stage_running()) {
            ReplyError(in.connection, kWireState, "no stage is running");
            return;
          }
          Dispatch(session->Handle(ConfirmEvent{now}), in.connection);
        } else if constexpr (std::is_same_v<P, StartStageMsg>) {
          try {
            live_frame.reset();
            stream = std::make_unique<StreamingEngine>(config.spec(p.sonification), config.synth);
            Dispatch(session->BeginStage(p.stage, p.sonification, now, p.seed), in.connection);
          } catch (const Error& e) {
            ReplyError(in.connection, kWireState, e.what());
          }
        } else if constexpr (std::is_same_v<P, EndLearningMsg>) {
          if (!session->runner() ||
              session->runner()->state() != StageRunner::State::kLearning) {
            ReplyError(in.connection, kWireState, "no learning task is running");
            return;
          }
          Dispatch(session->Handle(EndLearningEvent{now}), in.connection);
        } else if constexpr (std::is_same_v<P, AbortMsg>) {
          if (!session->stage_running()) {
            ReplyError(in.connection, kWireState, "no stage is running");
            return;
          }
          Dispatch(session->Handle(AbortEvent{now}), in.connection);
        }
      },
      in.message.payload);
}

void Server::Impl::OnTick() {
  if (!session->stage_running()) return;
  Dispatch(session->Handle(TickEvent{Now()}), 0);
  const StageRunner* runner = session->runner();
  if (runner == nullptr) return;
  const bool learning = runner->state() == StageRunner::State::kLearning;
  if (learning && live_frame) Broadcast(kToParticipant | kToObserver, FrameBody(*live_frame));
  if (config.service.audio_mode == AudioMode::kServerRenderedStream && stream &&
      (learning || runner->state() == StageRunner::State::kPlaying)) {
    const auto n = static_cast<std::size_t>(
        std::lround(config.sample_rate / config.service.frame_rate_hz));
    std::vector<float> left(n), right(n);
    stream->Process(left, right);
    std::vector<std::int16_t> pcm(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      pcm[2 * i] = static_cast<std::int16_t>(std::lround(std::clamp(left[i], -1.0f, 1.0f) * 32767.0f));
      pcm[2 * i + 1] = static_cast<std::int16_t>(std::lround(std::clamp(right[i], -1.0f, 1.0f) * 32767.0f));
    }
    net::post(ioc, [this, pcm = std::move(pcm)]() mutable {
      DeliverBinary(kToParticipant, std::move(pcm));
    });
  }
}

void Server::Impl::Dispatch(const std::vector<StageOutput>& outputs, std::uint64_t origin) {
  const StageRunner* runner = session->runner();
  const int stage = runner ? runner->stage().stage_id : 0;
  const SonificationKind kind = runner ? runner->spec().kind : SonificationKind::kFreq;
  for (const StageOutput& o : outputs) {
    std::visit(
        [&](const auto& x) {
          using X = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<X, LiveFrame>) {
            live_frame = x.frame;
            if (stream) stream->Push(x.frame);
          } else if constexpr (std::is_same_v<X, PlayTargetRequest>) {
            live_frame.reset();
            if (stream) stream->Push(x.frame);
            Broadcast(kToParticipant | kToObserver,
                      PlayTargetBody({x.frame}, x.duration_s, x.conceal));
          } else if constexpr (std::is_same_v<X, ConfirmRejected>) {
            if (origin != 0) ReplyError(origin, kWireState, x.reason);
          } else if constexpr (std::is_same_v<X, TrialDone>) {
            Broadcast(kToOperator, TrialResultBody(x.record));
            Broadcast(kToParticipant | kToObserver,
                      StageEventBody("trial_done", stage, kind, x.record.trial_id));
          } else if constexpr (std::is_same_v<X, BreakStarted>) {
            Broadcast(kToAll, StageEventBody("break_started", stage, kind, x.until_s - Now()));
          } else if constexpr (std::is_same_v<X, LearningStarted>) {
            Broadcast(kToAll, StageEventBody("learning_started", stage, kind, x.task_id));
          } else if constexpr (std::is_same_v<X, LearningDone>) {
            live_frame.reset();
            Broadcast(kToAll, StageEventBody("learning_done", stage, kind, x.record.task_id));
          } else if constexpr (std::is_same_v<X, TrackingPaused>) {
            Broadcast(kToAll, StageEventBody("tracking_paused", stage, kind, x.t_s));
          } else if constexpr (std::is_same_v<X, TrackingResumed>) {
            Broadcast(kToAll, StageEventBody("tracking_resumed", stage, kind, x.t_s));
          } else if constexpr (std::is_same_v<X, StageDone>) {
            live_frame.reset();
            Broadcast(kToAll, StageEventBody(x.record.complete ? "stage_done" : "stage_aborted",
                                             stage, kind, x.record.positioning_count));
          }
        },
        o);
  }
}

Server::Server(SessionConfig config, std::string participant_id, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(participant_id), seed)) {}

Server::~Server() {
  try {
    Stop();
  } catch (...) {
  }
}

void Server::HandleSignals() { impl_->handle_signals = true; }

void Server::Start() {
  Impl& s = *impl_;
  if (s.started) throw Error(ErrorCode::kState, "server already started");
  try {
    const tcp::endpoint ep(net::ip::make_address(s.config.service.address),
                           static_cast<unsigned short>(s.config.service.port));
    s.acceptor.open(ep.protocol());
    s.acceptor.set_option(net::socket_base::reuse_address(true));
    s.acceptor.bind(ep);
    s.acceptor.listen();
    s.bound_port = s.acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kNetwork, "cannot listen on " + s.config.service.address + ":" +
                                         std::to_string(s.config.service.port) + ": " +
                                         e.code().message());
  }
  s.log_file = s.config.service.log_path;
  SessionHeader header = MakeHeader(s.config, s.participant_id, s.seed);
  s.writer = std::make_unique<LogWriter>(s.log_file, header);
  s.session = std::make_unique<Session>(s.config, header, s.writer.get());
  if (s.handle_signals) {
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) RequestStop();
    });
  }
  s.work.emplace(net::make_work_guard(s.ioc));
  s.Accept();
  s.tick_timer.expires_at(std::chrono::steady_clock::now());
  s.ScheduleTick();
  s.started = true;
  s.session_thread = std::thread([&s] { s.SessionLoop(); });
  s.io_thread = std::thread([&s] { s.ioc.run(); });
}

unsigned short Server::port() const { return impl_->bound_port; }
const std::filesystem::path& Server::log_path() const { return impl_->log_file; }

void Server::Wait() {
  std::unique_lock<std::mutex> lock(impl_->stop_mutex);
  impl_->stop_cv.wait(lock, [this] { return impl_->stop_requested; });
}

void Server::RequestStop() {
  {
    std::lock_guard<std::mutex> lock(impl_->stop_mutex);
    impl_->stop_requested = true;
  }
  impl_->stop_cv.notify_all();
}

void Server::Stop() {
  Impl& s = *impl_;
  if (!s.started || s.stopped) return;
  s.stopped = true;
  RequestStop();
  s.queue.Push(Shutdown{});
  s.session_thread.join();
  std::promise<void> closed;
  net::post(s.ioc, [&s, &closed] {
    beast::error_code ec;
    s.acceptor.close(ec);
    s.tick_timer.cancel();
    s.signals.cancel(ec);
    for (auto& [id, c] : s.connections) c->Close();
    closed.set_value();
  });
  closed.get_future().wait_for(std::chrono::seconds(2));
  // Give close handshakes a moment, then stop regardless.
  s.work.reset();
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  s.ioc.stop();
  s.io_thread.join();
  s.connections.clear();
}

}  // namespace sonify
