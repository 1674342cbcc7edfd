#include "dcl/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "dcl/error.hpp"

namespace dcl {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kUnpacedBatch = 200;
constexpr std::uint64_t kMaxBatch = 1000;

}  // namespace

std::string to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::Paused: return "paused";
    case SessionStatus::Running: return "running";
    case SessionStatus::Converged: return "converged";
    case SessionStatus::Diverged: return "diverged";
  }
  return "unknown";
}

Session::Session(std::string id, SessionConfig config)
    : id_(std::move(id)),
      config_(std::move(config)),
      stepper_(config_.graph, config_.mode == SimMode::Planar, config_.initial_s),
      state_(config_.x0) {
  worker_ = std::jthread([this](std::stop_token stop) { loop(stop); });
}

Session::~Session() {
  worker_.request_stop();
  wake_.notify_all();
}

std::future<Ack> Session::set_parameter(double s) {
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidParameter, "s must be a finite number");
  std::future<Ack> result;
  {
    std::lock_guard lock(mutex_);
    pending_.push_back({s, {}});
    result = pending_.back().promise.get_future();
  }
  wake_.notify_all();
  return result;
}

void Session::run(std::optional<double> until) {
  {
    std::lock_guard lock(mutex_);
    if (status_ == SessionStatus::Diverged) return;
    stop_step_.reset();
    if (until) {
      if (!std::isfinite(*until)) throw Error(ErrorCode::InvalidParameter, "'until' must be finite");
      const double steps = std::ceil(*until / config_.dt - 1e-9);
      stop_step_ = steps <= 0.0 ? 0 : static_cast<std::uint64_t>(steps);
      if (*stop_step_ <= step_) return;
    }
    if (status_ != SessionStatus::Running) {
      wall_anchor_ = Clock::now();
      step_anchor_ = step_;
      quiet_steps_ = 0;
      set_status_locked(SessionStatus::Running);
    }
  }
  wake_.notify_all();
}

void Session::pause() {
  {
    std::lock_guard lock(mutex_);
    if (status_ == SessionStatus::Running) set_status_locked(SessionStatus::Paused);
  }
  wake_.notify_all();
}

Snapshot Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_locked();
}

Snapshot Session::snapshot_locked() const {
  return {step_, static_cast<double>(step_) * config_.dt, stepper_.s(), state_, status_};
}

std::vector<CommandLogEntry> Session::command_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

SwitchSchedule Session::replay_schedule(double t_end) const {
  const auto log = command_log();
  SwitchSchedule schedule;
  schedule.total_time = t_end;
  schedule.segments.push_back({0.0, config_.initial_s});
  std::uint64_t last_step = 0;
  for (const auto& entry : log) {
    if (entry.t >= t_end) break;
    if (entry.step == last_step) {
      schedule.segments.back().s = entry.s;
    } else {
      schedule.segments.push_back({entry.t, entry.s});
      last_step = entry.step;
    }
  }
  return schedule;
}

bool Session::wait_until_idle(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return wake_.wait_for(lock, timeout, [&] { return status_ != SessionStatus::Running; });
}

std::uint64_t Session::subscribe(Subscriber fn, double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw Error(ErrorCode::InvalidParameter, "stream rate must be a positive number of Hz");
  }
  std::lock_guard lock(subscribers_mutex_);
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rate_hz));
  subscribers_[next_token_] = {std::move(fn), period, Clock::now()};
  return next_token_++;
}

void Session::unsubscribe(std::uint64_t token) {
  std::lock_guard lock(subscribers_mutex_);
  subscribers_.erase(token);
}

void Session::unsubscribe_all() {
  std::lock_guard lock(subscribers_mutex_);
  subscribers_.clear();
}

std::size_t Session::subscriber_count() const {
  std::lock_guard lock(subscribers_mutex_);
  return subscribers_.size();
}

void Session::emit(const Frame& frame, bool state_frame) {
  std::lock_guard lock(subscribers_mutex_);
  const auto now = Clock::now();
  for (auto& [token, sub] : subscribers_) {
    if (state_frame) {
      if (now < sub.next_due) continue;
      sub.next_due = std::max(sub.next_due + sub.period, now);
    }
    sub.fn(frame);
  }
}

void Session::set_status_locked(SessionStatus status) {
  status_ = status;
  wake_.notify_all();
}

void Session::apply_commands_locked() {
  while (!pending_.empty()) {
    Pending cmd = std::move(pending_.front());
    pending_.pop_front();
    stepper_.set_s(cmd.s);
    const double t = static_cast<double>(step_) * config_.dt;
    log_.push_back({step_, t, cmd.s});
    cmd.promise.set_value({cmd.s, t, step_});
    if (status_ == SessionStatus::Converged) {
      wall_anchor_ = Clock::now();
      step_anchor_ = step_;
      quiet_steps_ = 0;
      status_ = SessionStatus::Running;
    }
  }
}

void Session::step_locked() {
  stepper_.step(state_, config_.dt);
  ++step_;
  if (!state_.allFinite() || state_.cwiseAbs().maxCoeff() > kDivergenceBound) {
    status_ = SessionStatus::Diverged;
    return;
  }
  const double rate = stepper_.derivative(state_).cwiseAbs().maxCoeff();
  quiet_steps_ = rate < kSteadyDerivative ? quiet_steps_ + 1 : 0;
  if (quiet_steps_ >= kSteadySteps) {
    status_ = SessionStatus::Converged;
    return;
  }
  if (stop_step_ && step_ >= *stop_step_) {
    stop_step_.reset();
    status_ = SessionStatus::Paused;
  }
}

void Session::loop(std::stop_token stop) {
  std::unique_lock lock(mutex_);
  SessionStatus announced = status_;
  std::size_t acked = 0;
  auto last_heartbeat = Clock::now();

  // Sends everything that changed since the last call, outside the lock.
  auto publish = [&](bool with_state) {
    std::vector<Frame> frames;
    for (; acked < log_.size(); ++acked) {
      Snapshot snap = snapshot_locked();
      snap.t = log_[acked].t;
      snap.s = log_[acked].s;
      frames.push_back({FrameType::Ack, std::move(snap)});
    }
    const bool status_changed = status_ != announced;
    announced = status_;
    const Snapshot snap = snapshot_locked();
    lock.unlock();
    for (const auto& f : frames) emit(f, false);
    if (with_state || status_changed) emit({FrameType::State, snap}, !status_changed);
    if (status_changed) emit({FrameType::Status, snap}, false);
    lock.lock();
  };

  while (!stop.stop_requested()) {
    apply_commands_locked();

    if (status_ != SessionStatus::Running) {
      publish(false);
      wake_.notify_all();
      const auto due = last_heartbeat + config_.heartbeat;
      wake_.wait_until(lock, stop, due, [&] {
        return !pending_.empty() || status_ != announced || status_ == SessionStatus::Running;
      });
      if (Clock::now() >= due) {
        last_heartbeat = Clock::now();
        const Snapshot snap = snapshot_locked();
        lock.unlock();
        emit({FrameType::Status, snap}, false);
        lock.lock();
      }
      continue;
    }

    std::uint64_t budget = kUnpacedBatch;
    if (config_.realtime_factor > 0.0) {
      const double elapsed = std::chrono::duration<double>(Clock::now() - wall_anchor_).count();
      const auto target = step_anchor_ + static_cast<std::uint64_t>(elapsed * config_.realtime_factor / config_.dt);
      if (step_ >= target) {
        const double wait_s = config_.dt / config_.realtime_factor;
        const auto wait = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(std::max(wait_s, 1e-4)));
        wake_.wait_for(lock, stop, std::min<Clock::duration>(wait, std::chrono::milliseconds(20)),
                       [&] { return !pending_.empty() || status_ != SessionStatus::Running; });
        continue;
      }
      budget = std::min<std::uint64_t>(target - step_, kMaxBatch);
    }
    for (std::uint64_t i = 0; i < budget && status_ == SessionStatus::Running && pending_.empty(); ++i) {
      step_locked();
    }
    publish(true);
    last_heartbeat = Clock::now();
    if (status_ != SessionStatus::Running) wake_.notify_all();
  }
}

// ---------------------------------------------------------------------------

std::shared_ptr<Session> SessionManager::create(SessionConfig config) {
  const int dim = config.mode == SimMode::Planar ? 2 * config.graph.order() : config.graph.order();
  if (config.x0.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has " + std::to_string(config.x0.size()) +
                                                  " entries, expected " + std::to_string(dim));
  }
  if (!config.x0.allFinite()) throw Error(ErrorCode::InvalidParameter, "x0 must be finite");
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw Error(ErrorCode::InvalidParameter, "dt must be positive");
  }
  if (!(config.realtime_factor >= 0.0) || !std::isfinite(config.realtime_factor)) {
    throw Error(ErrorCode::InvalidParameter, "realtime_factor must be >= 0");
  }
  if (!std::isfinite(config.initial_s)) throw Error(ErrorCode::InvalidParameter, "s must be finite");

  std::lock_guard lock(mutex_);
  if (sessions_.size() >= capacity_) {
    throw Error(ErrorCode::CapacityExceeded, "session limit of " + std::to_string(capacity_) + " reached");
  }
  const std::string id = fresh_id();
  auto session = std::make_shared<Session>(id, std::move(config));
  sessions_[id] = session;
  return session;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

bool SessionManager::remove(const std::string& id) {
  std::shared_ptr<Session> doomed;
  {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    doomed = std::move(it->second);
    sessions_.erase(it);
  }
  return true;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

void SessionManager::detach_subscribers() {
  std::lock_guard lock(mutex_);
  for (auto& [id, session] : sessions_) session->unsubscribe_all();
}

std::string SessionManager::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[24];
  std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(rng() >> 16));
  ++counter_;
  return buf;
}

}  // namespace dcl
