#include "doctest.h"

#include <chrono>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "dcl/error.hpp"
#include "dcl/server.hpp"
#include "dcl/service_api.hpp"

using namespace dcl;
using namespace std::chrono_literals;

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::string create_body(double s = 0.5, double rt = 0.0) {
  return Json{{"graph", "path:6"}, {"mode", "line"}, {"s", s}, {"realtime_factor", rt}}.dump();
}

struct HttpClient {
  explicit HttpClient(std::uint16_t port) : port(port) {}

  std::pair<int, Json> request(http::verb verb, const std::string& target, const std::string& body = {}) {
    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::tcp_stream stream(ioc);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "127.0.0.1");
    req.set(http::field::content_type, "application/json");
    req.body() = body;
    req.prepare_payload();
    http::write(stream, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(stream, buffer, res);
    last_headers = res.base();
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {res.result_int(), res.body().empty() ? Json() : Json::parse(res.body())};
  }

  std::uint16_t port;
  http::response_header<> last_headers;
};

}  // namespace

TEST_CASE("routing: session lifecycle") {
  SessionManager sessions(4);
  ServiceApi api(sessions);

  auto created = api.handle("POST", "/sessions", create_body());
  REQUIRE(created.status == 201);
  const std::string id = created.body.at("id");
  CHECK(created.body.at("status") == "paused");
  CHECK(created.body.at("n") == 6);
  CHECK(created.body.at("state").size() == 6);

  CHECK(api.handle("GET", "/sessions", "").body.at("sessions").size() == 1);
  CHECK(api.handle("GET", "/sessions/" + id, "").status == 200);

  auto run = api.handle("POST", "/sessions/" + id + "/run", R"({"until": 0.5})");
  CHECK(run.status == 200);
  sessions.get(id)->wait_until_idle(5s);
  CHECK(api.handle("GET", "/sessions/" + id, "").body.at("t") == doctest::Approx(0.5));

  auto ack = api.handle("POST", "/sessions/" + id + "/parameter", R"({"s": -1})");
  REQUIRE(ack.status == 200);
  CHECK(ack.body.at("type") == "ack");
  CHECK(ack.body.at("t") == doctest::Approx(0.5));
  CHECK(ack.body.at("s") == -1.0);

  REQUIRE(api.handle("POST", "/sessions/" + id + "/run", R"({"until": 1.0})").status == 200);
  sessions.get(id)->wait_until_idle(5s);
  auto log = api.handle("GET", "/sessions/" + id + "/log", "");
  REQUIRE(log.status == 200);
  CHECK(log.body.at("commands").size() == 1);
  CHECK(log.body.at("replay").at("schedule").size() == 2);
  CHECK(log.body.at("replay").at("T") == doctest::Approx(1.0));

  CHECK(api.handle("POST", "/sessions/" + id + "/pause", "").status == 200);
  CHECK(api.handle("DELETE", "/sessions/" + id, "").status == 200);
  CHECK(api.handle("GET", "/sessions/" + id, "").status == 404);
}

TEST_CASE("routing: errors map to status codes") {
  SessionManager sessions(1);
  ServiceApi api(sessions);
  CHECK(api.handle("GET", "/nope", "").status == 404);
  CHECK(api.handle("GET", "/sessions/unknown", "").status == 404);
  CHECK(api.handle("POST", "/sessions", "{not json").status == 400);
  CHECK(api.handle("POST", "/sessions", R"({"mode": "line"})").status == 400);
  CHECK(api.handle("POST", "/sessions", R"({"graph": "bogus:1"})").status == 400);
  CHECK(api.handle("POST", "/sessions", R"({"graph": "path:6", "mode": "line", "x0": [1, 2]})").status == 400);
  CHECK(api.handle("PUT", "/sessions", "").status == 405);

  auto created = api.handle("POST", "/sessions", create_body());
  REQUIRE(created.status == 201);
  CHECK(api.handle("POST", "/sessions", create_body()).status == 503);
  const std::string id = created.body.at("id");
  auto nan = api.handle("POST", "/sessions/" + id + "/parameter", R"({"s": "NaN"})");
  CHECK(nan.status == 400);
  CHECK(nan.body.at("error") == "InvalidParameter");
  CHECK(api.handle("POST", "/sessions/" + id + "/parameter", R"({"s": 1e999})").status == 400);
  CHECK(api.handle("POST", "/sessions/" + id + "/parameter", "{}").status == 400);
  CHECK(sessions.get(id)->snapshot().s == 0.5);
}

TEST_CASE("routing: analysis with presets") {
  SessionManager sessions;
  ServiceApi api(sessions);
  auto res = api.handle("GET", "/analysis?graph=path%3A6", "");
  REQUIRE(res.status == 200);
  CHECK(res.body.at("report").at("method") == "qep-sign-rule");
  CHECK(res.body.at("closed_form").at("method") == "closed-form");
  std::vector<double> preset_values;
  for (const auto& p : res.body.at("presets")) preset_values.push_back(p.at("s"));
  CHECK(std::find(preset_values.begin(), preset_values.end(), -1.0) != preset_values.end());
  CHECK(std::find(preset_values.begin(), preset_values.end(), 0.0) != preset_values.end());
  CHECK(std::find(preset_values.begin(), preset_values.end(), 1.0) != preset_values.end());

  auto directed = api.handle("GET", "/analysis?graph=directed-cycle:5", "");
  REQUIRE(directed.status == 200);
  CHECK(directed.body.at("report").at("method") == "sweep");
  CHECK(api.handle("GET", "/analysis", "").status == 400);
  CHECK(api.handle("GET", "/analysis?graph=/etc/passwd", "").status == 400);
}

TEST_CASE("stream target parsing and helpers") {
  const auto st = ServiceApi::parse_stream_target("/sessions/abc/stream?rate=10");
  REQUIRE(st);
  CHECK(st->session_id == "abc");
  CHECK(st->rate_hz == 10.0);
  CHECK(ServiceApi::parse_stream_target("/sessions/abc/stream")->rate_hz == 30.0);
  CHECK_FALSE(ServiceApi::parse_stream_target("/sessions/abc"));
  CHECK_THROWS_AS(ServiceApi::parse_stream_target("/sessions/abc/stream?rate=-1"), Error);
  CHECK_THROWS_AS(ServiceApi::parse_stream_target("/sessions/abc/stream?rate=fast"), Error);
  CHECK(percent_decode("a%3Ab+c%2") == "a:b c%2");
  CHECK(http_status_for(ErrorCode::UnknownSession) == 404);
  CHECK(http_status_for(ErrorCode::CapacityExceeded) == 503);
  CHECK(http_status_for(ErrorCode::InvalidParameter) == 400);
  CHECK(default_initial_state(4, SimMode::Planar).size() == 8);
  CHECK(default_initial_state(4, SimMode::Line).size() == 4);
}

TEST_CASE("stream messages") {
  SessionManager sessions;
  ServiceApi api(sessions);
  auto created = api.handle("POST", "/sessions", create_body());
  auto session = sessions.get(created.body.at("id"));
  CHECK(api.handle_stream_message(*session, R"({"type": "set_parameter", "s": 0.25})").at("type") == "ack");
  CHECK(api.handle_stream_message(*session, R"({"type": "set_parameter", "s": null})").at("type") == "error");
  CHECK(api.handle_stream_message(*session, R"({"type": "jump"})").at("type") == "error");
  CHECK(api.handle_stream_message(*session, "garbage").at("error") == "ParseError");
  CHECK(api.handle_stream_message(*session, R"({"type": "pause"})").at("status") == "paused");
  CHECK(session->snapshot().s == 0.25);
}

TEST_CASE("server: HTTP and WebSocket end to end") {
  ServerOptions opts;
  opts.port = 0;
  Server server(opts);
  server.start();
  REQUIRE(server.port() != 0);
  HttpClient client(server.port());

  auto [health_status, health] = client.request(http::verb::get, "/health");
  CHECK(health_status == 200);
  CHECK(health.at("status") == "ok");
  CHECK(client.last_headers[http::field::access_control_allow_origin] == "*");

  auto [options_status, options_body] = client.request(http::verb::options, "/sessions");
  CHECK(options_status == 204);

  auto [status, created] =
      client.request(http::verb::post, "/sessions", Json{{"graph", "path:6"}, {"mode", "planar"}}.dump());
  REQUIRE(status == 201);
  const std::string id = created.at("id");

  net::io_context ioc;
  tcp::resolver resolver(ioc);
  websocket::stream<tcp::socket> ws(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  ws.handshake("127.0.0.1", "/sessions/" + id + "/stream?rate=20");

  auto read_frame = [&] {
    beast::flat_buffer buffer;
    ws.read(buffer);
    return Json::parse(beast::buffers_to_string(buffer.data()));
  };
  CHECK(read_frame().at("type") == "status");
  auto first_state = read_frame();
  CHECK(first_state.at("type") == "state");
  CHECK(first_state.at("state").size() == 12);

  ws.write(net::buffer(std::string(R"({"type": "run"})")));
  const auto sent = std::chrono::steady_clock::now();
  ws.write(net::buffer(std::string(R"({"type": "set_parameter", "s": -1})")));
  bool got_ack = false;
  int state_frames = 0;
  double ack_latency_ms = 0.0;
  for (int i = 0; i < 50 && !(got_ack && state_frames >= 2); ++i) {
    const Json f = read_frame();
    if (f.at("type") == "ack" && !got_ack) {
      got_ack = true;
      ack_latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - sent).count();
      CHECK(f.at("s") == -1.0);
    }
    if (f.at("type") == "state") ++state_frames;
  }
  CHECK(got_ack);
  CHECK(ack_latency_ms < 200.0);
  CHECK(state_frames >= 2);
  ws.close(websocket::close_code::normal);

  // unknown session streams are refused before the upgrade
  websocket::stream<tcp::socket> bad(ioc);
  net::connect(bad.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  CHECK_THROWS(bad.handshake("127.0.0.1", "/sessions/missing/stream"));

  auto [deleted, body] = client.request(http::verb::delete_, "/sessions/" + id);
  CHECK(deleted == 200);
  server.stop();
}
