#include "dcl/service_api.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dcl/analysis.hpp"
#include "dcl/error.hpp"
#include "dcl/qep.hpp"
#include "dcl/spectra.hpp"

namespace dcl {

namespace {

HttpResult error_result(const Error& e) {
  return {http_status_for(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
}

HttpResult not_found(const std::string& what) {
  return {404, {{"error", "NotFound"}, {"message", what}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string item; std::getline(ss, item, '/');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::map<std::string, std::string> parse_query(const std::string& query) {
  std::map<std::string, std::string> out;
  std::stringstream ss(query);
  for (std::string item; std::getline(ss, item, '&');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      out[percent_decode(item)] = "";
    } else {
      out[percent_decode(item.substr(0, eq))] = percent_decode(item.substr(eq + 1));
    }
  }
  return out;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("request body is not JSON: ") + e.what());
  }
}

double finite_number(const Json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be a finite number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be finite");
  return d;
}

Json presets_for(const StabilityReport& report) {
  Json presets = Json::array();
  auto add = [&](double s, const std::string& label) {
    for (const auto& p : presets) {
      if (std::abs(p.at("s").get<double>() - s) < 1e-9) return;
    }
    presets.push_back({{"s", s}, {"label", label}});
  };
  for (const auto& m : report.marginal) add(m.s, m.kind + " at s = " + format_number(m.s));
  add(1.0, "average consensus");
  add(0.0, "contract to the origin");
  add(-1.0, "signless Laplacian");
  return presets;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::CapacityExceeded: return 503;
    case ErrorCode::EigensolverFailure:
    case ErrorCode::IllConditionedInterpolation:
      return 500;
    default: return 400;
  }
}

std::string percent_decode(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      out += ' ';
    } else if (text[i] == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      out += static_cast<char>(std::stoi(text.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

Vector default_initial_state(int n, SimMode mode) {
  if (mode == SimMode::Line) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? 0.0 : -3.0 + 6.0 * i / (n - 1);
    return x;
  }
  Vector p(2 * n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    p[2 * i] = 3.0 * std::cos(a);
    p[2 * i + 1] = 3.0 * std::sin(a);
  }
  return p;
}

Json snapshot_to_json(const Session& session, const Snapshot& snap) {
  const auto& cfg = session.config();
  return {{"id", session.id()},
          {"graph", cfg.graph.name()},
          {"n", cfg.graph.order()},
          {"mode", to_string(cfg.mode)},
          {"dt", cfg.dt},
          {"realtime_factor", cfg.realtime_factor},
          {"t", snap.t},
          {"step", snap.step},
          {"s", snap.s},
          {"status", to_string(snap.status)},
          {"state", std::vector<double>(snap.state.data(), snap.state.data() + snap.state.size())},
          {"subscribers", session.subscriber_count()}};
}

Json frame_to_json(const Frame& frame) {
  const Snapshot& snap = frame.snapshot;
  switch (frame.type) {
    case FrameType::State:
      return {{"type", "state"},
              {"t", snap.t},
              {"s", snap.s},
              {"status", to_string(snap.status)},
              {"state", std::vector<double>(snap.state.data(), snap.state.data() + snap.state.size())}};
    case FrameType::Status:
      return {{"type", "status"}, {"t", snap.t}, {"s", snap.s}, {"status", to_string(snap.status)}};
    case FrameType::Ack:
      return {{"type", "ack"}, {"t", snap.t}, {"s", snap.s}};
  }
  return {};
}

std::optional<StreamTarget> ServiceApi::parse_stream_target(const std::string& target) {
  const auto qpos = target.find('?');
  const auto parts = split_path(target.substr(0, qpos));
  if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "stream") return std::nullopt;
  StreamTarget out{parts[1], 30.0};
  if (qpos != std::string::npos) {
    const auto query = parse_query(target.substr(qpos + 1));
    if (const auto it = query.find("rate"); it != query.end()) {
      try {
        std::size_t used = 0;
        out.rate_hz = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParameter, "rate must be a number of Hz");
      }
      if (!(out.rate_hz > 0.0) || out.rate_hz > 1000.0) {
        throw Error(ErrorCode::InvalidParameter, "rate must lie in (0, 1000] Hz");
      }
    }
  }
  return out;
}

HttpResult ServiceApi::handle(const std::string& method, const std::string& target, const std::string& body) {
  try {
    const auto qpos = target.find('?');
    const std::string path = target.substr(0, qpos);
    const std::string query = qpos == std::string::npos ? "" : target.substr(qpos + 1);
    const auto parts = split_path(path);

    if (parts.size() == 1 && parts[0] == "health" && method == "GET") {
      return {200, {{"status", "ok"}, {"sessions", sessions_.ids().size()}}};
    }
    if (parts.size() == 1 && parts[0] == "analysis" && method == "GET") return analysis(query);
    if (parts.empty() || parts[0] != "sessions") return not_found("no route for " + path);

    if (parts.size() == 1) {
      if (method == "POST") return create_session(parse_body(body));
      if (method == "GET") return {200, {{"sessions", sessions_.ids()}}};
      return {405, {{"error", "MethodNotAllowed"}, {"message", method + " " + path}}};
    }

    auto session = sessions_.get(parts[1]);
    if (parts.size() == 2) {
      if (method == "GET") return {200, snapshot_to_json(*session, session->snapshot())};
      if (method == "DELETE") {
        sessions_.remove(parts[1]);
        return {200, {{"id", parts[1]}, {"removed", true}}};
      }
    } else if (parts.size() == 3 && method == "POST") {
      const Json doc = parse_body(body);
      if (parts[2] == "parameter") return set_parameter(*session, doc);
      if (parts[2] == "run") {
        std::optional<double> until;
        if (doc.contains("until")) until = finite_number(doc.at("until"), "until");
        session->run(until);
        return {200, snapshot_to_json(*session, session->snapshot())};
      }
      if (parts[2] == "pause") {
        session->pause();
        session->wait_until_idle(ack_timeout_);
        return {200, snapshot_to_json(*session, session->snapshot())};
      }
    } else if (parts.size() == 3 && method == "GET" && parts[2] == "log") {
      const Snapshot snap = session->snapshot();
      const auto& cfg = session->config();
      Json commands = Json::array();
      for (const auto& c : session->command_log()) commands.push_back({{"t", c.t}, {"step", c.step}, {"s", c.s}});
      Json replay = {{"name", "replay-" + session->id()},
                     {"graph", graph_to_json(cfg.graph)},
                     {"mode", to_string(cfg.mode)},
                     {"x0", std::vector<double>(cfg.x0.data(), cfg.x0.data() + cfg.x0.size())},
                     {"dt", cfg.dt}};
      if (snap.step > 0) {
        replay["T"] = snap.t;
        replay["schedule"] = schedule_to_json(session->replay_schedule(snap.t));
      }
      return {200, {{"id", session->id()}, {"t", snap.t}, {"initial_s", cfg.initial_s},
                    {"commands", commands}, {"replay", replay}}};
    }
    return {405, {{"error", "MethodNotAllowed"}, {"message", method + " " + path}}};
  } catch (const Error& e) {
    return error_result(e);
  }
}

HttpResult ServiceApi::create_session(const Json& body) {
  if (!body.is_object() || !body.contains("graph")) {
    throw Error(ErrorCode::InvalidGraph, "request needs a 'graph' (family spec or graph document)");
  }
  SessionConfig cfg;
  try {
    const Json& g = body.at("graph");
    cfg.graph = g.is_string() ? resolve_graph(g.get<std::string>()).graph : graph_from_json(g).graph;
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidGraph, e.what());
  }
  cfg.mode = sim_mode_from_string(body.value("mode", std::string("planar")));
  if (body.contains("x0")) {
    const Json& x = body.at("x0");
    if (!x.is_array()) throw Error(ErrorCode::InvalidParameter, "x0 must be an array of numbers");
    cfg.x0.resize(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) cfg.x0[static_cast<Eigen::Index>(i)] = finite_number(x[i], "x0 entry");
  } else {
    cfg.x0 = default_initial_state(cfg.graph.order(), cfg.mode);
  }
  if (body.contains("dt")) cfg.dt = finite_number(body.at("dt"), "dt");
  if (body.contains("s")) cfg.initial_s = finite_number(body.at("s"), "s");
  if (body.contains("realtime_factor")) cfg.realtime_factor = finite_number(body.at("realtime_factor"), "realtime_factor");
  auto session = sessions_.create(std::move(cfg));
  return {201, snapshot_to_json(*session, session->snapshot())};
}

HttpResult ServiceApi::set_parameter(Session& session, const Json& body) {
  if (!body.is_object() || !body.contains("s")) throw Error(ErrorCode::InvalidParameter, "body needs 's'");
  const double s = finite_number(body.at("s"), "s");
  auto ack = session.set_parameter(s);
  if (ack.wait_for(ack_timeout_) != std::future_status::ready) {
    return {504, {{"error", "Timeout"}, {"message", "session did not acknowledge in time"}}};
  }
  const Ack a = ack.get();
  return {200, {{"type", "ack"}, {"s", a.s}, {"t", a.effective_time}, {"step", a.effective_step}}};
}

HttpResult ServiceApi::analysis(const std::string& query) {
  const auto params = parse_query(query);
  const auto it = params.find("graph");
  if (it == params.end()) throw Error(ErrorCode::InvalidParameter, "analysis needs ?graph=SPEC");
  GraphSource src = [&] {
    try {
      return GraphSource{generate_family(GraphFamily::parse(it->second)), GraphFamily::parse(it->second)};
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidGraph, e.what());
    }
  }();
  const Graph& g = src.graph;
  StabilityReport report = numeric_report(g);
  Json body = {{"report", report_to_json(report)}, {"presets", presets_for(report)}};
  if (src.family) {
    try {
      body["closed_form"] = report_to_json(stability_report(family_stability(*src.family)));
    } catch (const Error&) {
      // families without a tabulated closed form only get the numeric report
    }
  }
  return {200, body};
}

Json ServiceApi::handle_stream_message(Session& session, const std::string& text) {
  try {
    const Json msg = parse_body(text);
    const std::string type = msg.value("type", std::string());
    if (type == "set_parameter") {
      auto body = set_parameter(session, msg);
      return body.body;
    }
    if (type == "run") {
      std::optional<double> until;
      if (msg.contains("until")) until = finite_number(msg.at("until"), "until");
      session.run(until);
      return frame_to_json({FrameType::Status, session.snapshot()});
    }
    if (type == "pause") {
      session.pause();
      session.wait_until_idle(ack_timeout_);
      return frame_to_json({FrameType::Status, session.snapshot()});
    }
    throw Error(ErrorCode::InvalidParameter, "unknown message type '" + type + "'");
  } catch (const Error& e) {
    return {{"type", "error"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  }
}

}  // namespace dcl
