#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcl/analysis.hpp"
#include "dcl/dynamics.hpp"
#include "dcl/error.hpp"
#include "dcl/io.hpp"
#include "dcl/scenario.hpp"

using namespace dcl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("graph documents round-trip") {
  const Graph g = build_graph(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}}, true, "square");
  const auto back = graph_from_json(graph_to_json(g));
  CHECK(back.graph == g);
  CHECK(back.graph.name() == "square");
  CHECK_FALSE(back.family);
}

TEST_CASE("family documents round-trip for every family") {
  for (const char* spec : {"path:6", "cycle:5", "mtree:2:3", "wheel:5", "hypercube:3", "petersen", "complete:5",
                           "kbip:2:3", "star:4", "directed-path:4", "directed-cycle:5"}) {
    CAPTURE(spec);
    const auto f = GraphFamily::parse(spec);
    const auto src = graph_from_json(family_to_json(f));
    REQUIRE(src.family);
    CHECK(*src.family == f);
    CHECK(src.graph == generate_family(f));
  }
}

TEST_CASE("family files re-read by analysis give identical reports") {
  for (const char* spec : {"complete:5", "wheel:5", "mtree:2:3"}) {
    const auto f = GraphFamily::parse(spec);
    const std::string path = temp_file(std::string("dcl_family_") + f.spec().substr(0, 4) + ".json",
                                       family_to_json(f).dump());
    const auto direct = report_to_json(analyze({generate_family(f), f}));
    const auto from_file = report_to_json(analyze(resolve_graph(path)));
    CHECK(direct == from_file);
  }
}

TEST_CASE("malformed graph documents") {
  CHECK(code_of([] { graph_from_json(Json::parse(R"({"edges": [[1,2]]})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { graph_from_json(Json::parse(R"({"n": 3, "edges": [[1]]})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { graph_from_json(Json::parse(R"({"n": 3, "edges": [[1, "a"]]})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { graph_from_json(Json::parse(R"({"family": "nope", "n": 3})")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { graph_from_json(Json::parse("[1, 2]")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { graph_from_json(Json::parse(R"({"n": 3, "edges": [[1, 1]]})")); }) == ErrorCode::SelfLoop);
  CHECK(code_of([] { read_json_file("/nonexistent/graph.json"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { resolve_graph("not-a-family"); }) == ErrorCode::ParseError);
}

TEST_CASE("reports round-trip through JSON") {
  const auto f = GraphFamily::path(6);
  const auto report = analyze({generate_family(f), std::nullopt});
  const auto back = report_from_json(report_to_json(report));
  CHECK(back.graph == report.graph);
  CHECK(back.method == report.method);
  CHECK(back.stable == report.stable);
  CHECK(back.unstable == report.unstable);
  REQUIRE(back.marginal.size() == report.marginal.size());
  CHECK(back.q == report.q);
  CHECK(interval_from_json(interval_to_json({-INFINITY, 2.0})).lo == -INFINITY);
  CHECK(interval_to_json({1.0, INFINITY})[1] == "+inf");
}

TEST_CASE("text report shows six significant digits and agrees with JSON") {
  const auto report = analyze({generate_family(GraphFamily::complete(5)), GraphFamily::complete(5)});
  const std::string text = format_report(report);
  CHECK(text.find("closed-form") != std::string::npos);
  CHECK(text.find("0.333333") != std::string::npos);
  const auto doc = report_to_json(report);
  CHECK(format_number(doc["stable"][0][1].get<double>()) == "0.333333");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("sign-rule text report prints q(s)") {
  const auto report = analyze({generate_family(GraphFamily::path(6)), std::nullopt});
  const std::string text = format_report(report);
  CHECK(text.find("qep-sign-rule") != std::string::npos);
  CHECK(text.find("1 - s^2") != std::string::npos);
}

TEST_CASE("schedules accept objects and pairs") {
  const auto a = schedule_from_json(Json::parse(R"([{"t": 0, "s": -1}, {"t": 3, "s": 0}])"), 15.0);
  const auto b = schedule_from_json(Json::parse("[[0, -1], [3, 0]]"), 15.0);
  CHECK(a == b);
  CHECK(a.s_at(2.9) == -1.0);
  CHECK(a.s_at(3.0) == 0.0);
  CHECK(schedule_from_json(schedule_to_json(a), 15.0) == a);
  CHECK(code_of([] { schedule_from_json(Json::parse(R"([{"t": 0}])"), 1.0); }) == ErrorCode::ParseError);
}

TEST_CASE("CSV output") {
  const Graph g = generate_family(GraphFamily::path(3));
  std::ostringstream line_csv, planar_csv;
  write_csv(integrate(g, SwitchSchedule::constant(0.0, 0.01), Vector::Ones(3), 1e-3), line_csv);
  write_csv(planar_sim(g, SwitchSchedule::constant(0.0, 0.01), Vector::Ones(6), 1e-3), planar_csv);
  CHECK(line_csv.str().rfind("time,s,x1,x2,x3\n", 0) == 0);
  CHECK(planar_csv.str().rfind("time,s,p1x,p1y,p2x,p2y,p3x,p3y\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : line_csv.str()) lines += c == '\n';
  CHECK(lines == 12);
}

TEST_CASE("scenario documents") {
  const char* doc = R"({
    "name": "demo", "graph": "cycle:4", "mode": "line", "x0": [1, 2, 3, 4],
    "dt": 0.01, "T": 2, "schedule": [[0, 1]], "record_stride": 5
  })";
  const Scenario sc = scenario_from_json(Json::parse(doc));
  CHECK(sc.graph.order() == 4);
  CHECK(sc.mode == SimMode::Line);
  CHECK(sc.record_stride == 5);
  const Scenario back = scenario_from_json(scenario_to_json(sc));
  CHECK(back.x0 == sc.x0);
  CHECK(back.schedule == sc.schedule);

  CHECK(code_of([] {
          scenario_from_json(Json::parse(
              R"({"graph": "cycle:4", "x0": [1, 2, 3], "dt": 0.01, "T": 1, "schedule": [[0, 1]]})"));
        }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] {
          scenario_from_json(Json::parse(
              R"({"graph": "cycle:4", "x0": [1, 2, 3, 4], "dt": 0.001, "T": 2, "schedule": [[0, 1], [1.0005, 0]]})"));
        }) == ErrorCode::StepMismatch);
  CHECK(code_of([] { scenario_from_json(Json::parse(R"({"graph": "cycle:4"})")); }) == ErrorCode::ParseError);
}

TEST_CASE("built-in scenarios load and are consistent") {
  for (const auto& name : builtin_scenario_names()) {
    CAPTURE(name);
    const Scenario sc = builtin_scenario(name);
    CHECK(sc.name == name);
    CHECK(sc.mode == SimMode::Planar);
    CHECK(sc.x0.size() == 2 * sc.graph.order());
    CHECK_NOTHROW(sc.schedule.validate());
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    CHECK(back.graph == sc.graph);
  }
  CHECK(code_of([] { builtin_scenario("no-such-scenario"); }) == ErrorCode::InvalidParameter);
}
