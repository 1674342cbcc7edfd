#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dcl/dynamics.hpp"
#include "dcl/scenario.hpp"

namespace dcl {

enum class SessionStatus { Paused, Running, Converged, Diverged };
std::string to_string(SessionStatus status);

struct SessionConfig {
  Graph graph{1, {}, false};
  SimMode mode = SimMode::Line;
  Vector x0;
  double dt = 1e-3;
  double initial_s = 1.0;
  double realtime_factor = 1.0;  ///< simulated seconds per wall second; 0 runs unpaced
  std::chrono::milliseconds heartbeat{1000};
};

struct Snapshot {
  std::uint64_t step = 0;
  double t = 0.0;
  double s = 1.0;
  Vector state;
  SessionStatus status = SessionStatus::Paused;
};

struct Ack {
  double s = 0.0;
  double effective_time = 0.0;  ///< simulation time of the first step that uses s
  std::uint64_t effective_step = 0;
};

/// A parameter change as it took effect, in simulation time.
struct CommandLogEntry {
  std::uint64_t step = 0;
  double t = 0.0;
  double s = 0.0;
};

enum class FrameType { State, Status, Ack };

struct Frame {
  FrameType type = FrameType::State;
  Snapshot snapshot;
};

/// One live simulation steered by parameter commands.
///
/// A worker thread owns the state. Commands queue up and are applied between
/// whole RK4 steps; subscribers receive rate-limited state frames, every status
/// change, every ack, and a status heartbeat while the session is not stepping.
class Session {
 public:
  using Subscriber = std::function<void(const Frame&)>;

  Session(std::string id, SessionConfig config);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }

  /// Throws InvalidParameter for non-finite s; the parameter is left unchanged.
  std::future<Ack> set_parameter(double s);

  /// Starts stepping; with `until`, pauses again once t reaches it.
  void run(std::optional<double> until = std::nullopt);
  void pause();

  Snapshot snapshot() const;
  std::vector<CommandLogEntry> command_log() const;

  /// Schedule that reproduces this session up to time t_end with integrate/planar_sim.
  SwitchSchedule replay_schedule(double t_end) const;

  /// rate_hz bounds state frames; status and ack frames are never dropped.
  std::uint64_t subscribe(Subscriber fn, double rate_hz);
  void unsubscribe(std::uint64_t token);
  /// Drops every subscriber; no callback runs after this returns.
  void unsubscribe_all();
  std::size_t subscriber_count() const;

  /// Blocks until the session is no longer running or the timeout expires.
  bool wait_until_idle(std::chrono::milliseconds timeout) const;

 private:
  struct Pending {
    double s;
    std::promise<Ack> promise;
  };
  struct Subscription {
    Subscriber fn;
    std::chrono::steady_clock::duration period;
    std::chrono::steady_clock::time_point next_due;
  };

  void loop(std::stop_token stop);
  void apply_commands_locked();
  void step_locked();
  void set_status_locked(SessionStatus status);
  Snapshot snapshot_locked() const;
  void emit(const Frame& frame, bool state_frame);

  std::string id_;
  SessionConfig config_;
  Rk4Stepper stepper_;

  mutable std::mutex mutex_;
  mutable std::condition_variable_any wake_;
  Vector state_;
  std::uint64_t step_ = 0;
  SessionStatus status_ = SessionStatus::Paused;
  std::optional<std::uint64_t> stop_step_;
  int quiet_steps_ = 0;
  std::deque<Pending> pending_;
  std::vector<CommandLogEntry> log_;
  std::chrono::steady_clock::time_point wall_anchor_;
  std::uint64_t step_anchor_ = 0;

  mutable std::mutex subscribers_mutex_;
  std::map<std::uint64_t, Subscription> subscribers_;
  std::uint64_t next_token_ = 1;

  std::jthread worker_;
};

/// Owns the sessions of one service instance.
class SessionManager {
 public:
  explicit SessionManager(std::size_t capacity = 64) : capacity_(capacity) {}

  /// Throws InvalidGraph, InvalidParameter, DimensionMismatch, CapacityExceeded.
  std::shared_ptr<Session> create(SessionConfig config);
  /// Throws UnknownSession.
  std::shared_ptr<Session> get(const std::string& id) const;
  bool remove(const std::string& id);
  std::vector<std::string> ids() const;
  /// Detaches all subscribers from every session, ahead of transport shutdown.
  void detach_subscribers();
  std::size_t capacity() const { return capacity_; }

 private:
  std::string fresh_id();

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace dcl
