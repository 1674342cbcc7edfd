#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "dcl/error.hpp"
#include "dcl/io.hpp"
#include "dcl/session.hpp"

namespace dcl {

struct HttpResult {
  int status = 200;
  Json body;
};

struct StreamTarget {
  std::string session_id;
  double rate_hz = 30.0;
};

/// Request routing for the steering service, independent of the transport.
///
///   POST   /sessions                   create {graph, mode, x0?, dt?, s?, realtime_factor?}
///   GET    /sessions                   list ids
///   GET    /sessions/{id}              snapshot
///   DELETE /sessions/{id}              remove
///   POST   /sessions/{id}/parameter    {s} -> ack with effective time
///   POST   /sessions/{id}/run          {until?}
///   POST   /sessions/{id}/pause
///   GET    /sessions/{id}/log          command log and replay schedule
///   GET    /analysis?graph=SPEC        stability report plus steering presets
///   GET    /health
///   WS     /sessions/{id}/stream?rate=HZ
class ServiceApi {
 public:
  explicit ServiceApi(SessionManager& sessions,
                      std::chrono::milliseconds ack_timeout = std::chrono::milliseconds(2000))
      : sessions_(sessions), ack_timeout_(ack_timeout) {}

  HttpResult handle(const std::string& method, const std::string& target, const std::string& body);

  /// Matches /sessions/{id}/stream[?rate=HZ]; throws InvalidParameter for a bad rate.
  static std::optional<StreamTarget> parse_stream_target(const std::string& target);

  SessionManager& sessions() { return sessions_; }

  /// Applies a client message received over the stream socket, e.g.
  /// {"type": "set_parameter", "s": -1}. Returns the reply frame.
  Json handle_stream_message(Session& session, const std::string& text);

 private:
  HttpResult create_session(const Json& body);
  HttpResult set_parameter(Session& session, const Json& body);
  HttpResult analysis(const std::string& query);

  SessionManager& sessions_;
  std::chrono::milliseconds ack_timeout_;
};

Json frame_to_json(const Frame& frame);
Json snapshot_to_json(const Session& session, const Snapshot& snap);

/// Default initial state: agents evenly spread on a line, or on a circle of radius 3.
Vector default_initial_state(int n, SimMode mode);

/// HTTP status code for an error code.
int http_status_for(ErrorCode code);

std::string percent_decode(const std::string& text);

}  // namespace dcl
