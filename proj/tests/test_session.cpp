#include "doctest.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "dcl/error.hpp"
#include "dcl/session.hpp"

using namespace dcl;
using namespace std::chrono_literals;

namespace {

SessionConfig path_config(double s, double realtime_factor = 0.0) {
  SessionConfig cfg;
  cfg.graph = generate_family(GraphFamily::path(6));
  cfg.mode = SimMode::Planar;
  cfg.x0 = Vector(12);
  cfg.x0 << -5, 4, -3, -4, -1, 4, 1, -4, 3, 4, 5, -4;
  cfg.dt = 1e-3;
  cfg.initial_s = s;
  cfg.realtime_factor = realtime_factor;
  cfg.heartbeat = 50ms;
  return cfg;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("run(until) pauses at the requested time") {
  Session session("a", path_config(0.5));
  session.run(0.25);
  REQUIRE(session.wait_until_idle(5s));
  const auto snap = session.snapshot();
  CHECK(snap.status == SessionStatus::Paused);
  CHECK(snap.step == 250);
  CHECK(snap.t == doctest::Approx(0.25));
}

TEST_CASE("steered session replays bit-identically through planar_sim") {
  const auto cfg = path_config(-1.0);
  Session session("b", cfg);
  session.run(1.0);
  REQUIRE(session.wait_until_idle(5s));
  const Ack ack = session.set_parameter(0.0).get();
  CHECK(ack.effective_step == 1000);
  CHECK(ack.effective_time == doctest::Approx(1.0));
  session.run(1.5);
  REQUIRE(session.wait_until_idle(5s));
  session.set_parameter(0.7).get();
  session.run(2.0);
  REQUIRE(session.wait_until_idle(5s));

  const auto snap = session.snapshot();
  REQUIRE(snap.step == 2000);
  const auto schedule = session.replay_schedule(snap.t);
  REQUIRE(schedule.segments.size() == 3);
  CHECK(schedule.segments[1].s == 0.0);
  CHECK(schedule.segments[2].s == 0.7);
  const auto traj = planar_sim(cfg.graph, schedule, cfg.x0, cfg.dt);
  CHECK(traj.final_state() == snap.state);  // exact, not approximate
  CHECK(session.command_log().size() == 2);
}

TEST_CASE("two sessions with the same commands agree exactly") {
  Session a("c1", path_config(-1.0));
  Session b("c2", path_config(-1.0));
  for (Session* s : {&a, &b}) {
    s->run(0.3);
    REQUIRE(s->wait_until_idle(5s));
    s->set_parameter(0.2).get();
    s->run(0.6);
    REQUIRE(s->wait_until_idle(5s));
  }
  CHECK(a.snapshot().state == b.snapshot().state);
}

TEST_CASE("non-finite parameters are rejected and leave s unchanged") {
  Session session("d", path_config(0.5));
  CHECK(code_of([&] { session.set_parameter(NAN); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([&] { session.set_parameter(INFINITY); }) == ErrorCode::InvalidParameter);
  CHECK(session.snapshot().s == 0.5);
  CHECK(session.command_log().empty());
}

TEST_CASE("divergence is terminal") {
  Session session("e", path_config(3.0));
  session.run();
  REQUIRE(session.wait_until_idle(20s));
  CHECK(session.snapshot().status == SessionStatus::Diverged);
  session.run();
  CHECK(session.snapshot().status == SessionStatus::Diverged);
}

TEST_CASE("convergence stops stepping and a new parameter resumes") {
  auto cfg = path_config(0.0);
  cfg.dt = 1e-2;
  Session session("f", cfg);
  session.run();
  REQUIRE(session.wait_until_idle(20s));
  CHECK(session.snapshot().status == SessionStatus::Converged);
  const auto converged_step = session.snapshot().step;
  session.set_parameter(1.0).get();
  std::this_thread::sleep_for(20ms);
  REQUIRE(session.wait_until_idle(20s));
  CHECK(session.snapshot().step >= converged_step);
  CHECK(session.snapshot().status == SessionStatus::Converged);
}

TEST_CASE("subscribers get acks, status changes and rate-limited state frames") {
  Session session("g", path_config(0.5, 1.0));
  std::mutex m;
  int states = 0, statuses = 0, acks = 0;
  const auto token = session.subscribe(
      [&](const Frame& f) {
        std::lock_guard lock(m);
        if (f.type == FrameType::State) ++states;
        if (f.type == FrameType::Status) ++statuses;
        if (f.type == FrameType::Ack) ++acks;
      },
      20.0);
  session.run();
  std::this_thread::sleep_for(500ms);
  session.set_parameter(0.2).get();
  std::this_thread::sleep_for(100ms);
  session.pause();
  REQUIRE(session.wait_until_idle(2s));
  std::this_thread::sleep_for(100ms);
  session.unsubscribe(token);
  CHECK(session.subscriber_count() == 0);

  std::lock_guard lock(m);
  CHECK(acks == 1);
  CHECK(statuses >= 2);
  CHECK(states >= 3);
  CHECK(states <= 20);  // 20 Hz over about 0.6 s, plus transition frames
  // paced at one simulated second per wall second
  CHECK(session.snapshot().t == doctest::Approx(0.6).epsilon(0.25));
}

TEST_CASE("session manager") {
  SessionManager manager(2);
  auto a = manager.create(path_config(0.5));
  auto b = manager.create(path_config(0.5));
  CHECK(a->id() != b->id());
  CHECK(a->id().size() == 12);
  CHECK(code_of([&] { manager.create(path_config(0.5)); }) == ErrorCode::CapacityExceeded);
  CHECK(manager.get(a->id()) == a);
  CHECK(manager.remove(a->id()));
  CHECK_FALSE(manager.remove(a->id()));
  CHECK(code_of([&] { manager.get(a->id()); }) == ErrorCode::UnknownSession);

  auto bad = path_config(0.5);
  bad.x0 = Vector::Ones(5);
  CHECK(code_of([&] { manager.create(bad); }) == ErrorCode::DimensionMismatch);
  bad = path_config(NAN);
  CHECK(code_of([&] { manager.create(bad); }) == ErrorCode::InvalidParameter);
  bad = path_config(0.5);
  bad.dt = 0.0;
  CHECK(code_of([&] { manager.create(bad); }) == ErrorCode::InvalidParameter);
}
