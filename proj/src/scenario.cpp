#include "dcl/scenario.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "dcl/error.hpp"
#include "dcl/qep.hpp"
#include "dcl/spectra.hpp"

namespace dcl {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

Graph graph_from_doc(const Json& doc) {
  if (doc.is_string()) return resolve_graph(doc.get<std::string>()).graph;
  return graph_from_json(doc).graph;
}

Vector vector_from_json(const Json& doc, const char* what) {
  if (!doc.is_array()) parse_error(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) parse_error(std::string(what) + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  }
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Scenario make(std::string name, std::string description, Json graph_doc, SimMode mode, Vector x0,
              SwitchSchedule schedule, int stride,
              std::optional<std::pair<double, double>> fit_window = std::nullopt) {
  Scenario sc;
  sc.name = std::move(name);
  sc.description = std::move(description);
  sc.graph = graph_from_doc(graph_doc);
  sc.graph_doc = std::move(graph_doc);
  sc.mode = mode;
  sc.x0 = std::move(x0);
  sc.dt = 1e-3;
  sc.schedule = std::move(schedule);
  sc.record_stride = stride;
  sc.fit_window = fit_window;
  return sc;
}

// Limit of the final segment, starting from the recorded state at its start.
std::optional<ScenarioLimit> final_segment_limit(const Scenario& sc, const Trajectory& traj) {
  const SwitchSegment& last = sc.schedule.segments.back();
  std::size_t at = traj.times.size();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (std::abs(traj.times[k] - last.t_start) <= 1e-9 * std::max(1.0, last.t_start)) {
      at = k;
      break;
    }
  }
  if (at == traj.times.size()) return std::nullopt;
  const Vector& start = traj.states[at];

  ScenarioLimit out;
  out.switch_time = last.t_start;
  out.value = Vector::Zero(start.size());
  const int n = sc.graph.order();
  const int coords = sc.mode == SimMode::Planar ? 2 : 1;
  for (int c = 0; c < coords; ++c) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = start[i * coords + c];
    const LimitPrediction p = predicted_limit(sc.graph, last.s, x);
    out.kind = p.kind;
    if (p.kind == LimitKind::Divergent) return out;
    for (int i = 0; i < n; ++i) out.value[i * coords + c] = (*p.limit)[i];
  }
  if (out.kind == LimitKind::Limit) out.groups = marginal_mode(sc.graph, last.s).groups;
  return out;
}

}  // namespace

std::string to_string(SimMode mode) { return mode == SimMode::Planar ? "planar" : "line"; }

SimMode sim_mode_from_string(const std::string& text) {
  if (text == "line") return SimMode::Line;
  if (text == "planar") return SimMode::Planar;
  throw Error(ErrorCode::ParseError, "mode must be 'line' or 'planar', got '" + text + "'");
}

Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) parse_error("scenario must be a JSON object");
  try {
    for (const char* key : {"graph", "x0", "dt", "T", "schedule"}) {
      if (!doc.contains(key)) parse_error(std::string("scenario is missing '") + key + "'");
    }
    Scenario sc;
    sc.name = doc.value("name", std::string("scenario"));
    sc.description = doc.value("description", std::string());
    sc.graph_doc = doc.at("graph");
    sc.graph = graph_from_doc(sc.graph_doc);
    sc.mode = sim_mode_from_string(doc.value("mode", std::string("line")));
    sc.x0 = vector_from_json(doc.at("x0"), "x0");
    if (!doc.at("dt").is_number() || !doc.at("T").is_number()) parse_error("dt and T must be numbers");
    sc.dt = doc.at("dt").get<double>();
    if (!(sc.dt > 0.0)) parse_error("dt must be positive");
    sc.schedule = schedule_from_json(doc.at("schedule"), doc.at("T").get<double>());
    sc.record_stride = doc.value("record_stride", 1);
    if (sc.record_stride < 1) parse_error("record_stride must be at least 1");
    if (doc.contains("fit_window")) {
      const Interval w = interval_from_json(doc.at("fit_window"));
      sc.fit_window = std::make_pair(w.lo, w.hi);
    }
    const int dim = sc.mode == SimMode::Planar ? 2 * sc.graph.order() : sc.graph.order();
    if (sc.x0.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "x0 has " + std::to_string(sc.x0.size()) + " entries, expected " + std::to_string(dim));
    }
    const auto& segs = sc.schedule.segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const double end = i + 1 < segs.size() ? segs[i + 1].t_start : sc.schedule.total_time;
      aligned_steps(end - segs[i].t_start, sc.dt);
    }
    return sc;
  } catch (const Json::exception& e) {
    parse_error(std::string("malformed scenario: ") + e.what());
  }
}

Json scenario_to_json(const Scenario& sc) {
  Json doc = {{"name", sc.name},
              {"graph", sc.graph_doc},
              {"mode", to_string(sc.mode)},
              {"x0", to_std(sc.x0)},
              {"dt", sc.dt},
              {"T", sc.schedule.total_time},
              {"schedule", schedule_to_json(sc.schedule)},
              {"record_stride", sc.record_stride}};
  if (!sc.description.empty()) doc["description"] = sc.description;
  if (sc.fit_window) doc["fit_window"] = {sc.fit_window->first, sc.fit_window->second};
  return doc;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

Graph chorded_directed_cycle(bool reversed_chord) {
  std::vector<std::pair<int, int>> edges = {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}};
  edges.push_back(reversed_chord ? std::pair{3, 1} : std::pair{1, 3});
  return build_graph(5, edges, true, reversed_chord ? "directed-cycle:5+3->1" : "directed-cycle:5+1->3");
}

std::vector<std::string> builtin_scenario_names() { return {"path-split", "octagon-clusters", "dcycle-orbit", "dcycle-chord-orbit"}; }

Scenario builtin_scenario(const std::string& name) {
  if (name == "path-split") {
    Vector p0(12);
    p0 << -5, 4, -3, -4, -1, 4, 1, -4, 3, 4, 5, -4;
    return make("path-split", "Path of six agents: bipartite split at s = -1, then rendezvous at the origin with s = 0.",
                "path:6", SimMode::Planar, p0, {{{0.0, -1.0}, {3.0, 0.0}}, 15.0}, 10);
  }
  if (name == "octagon-clusters") {
    // Agents sit on a regular octagon of radius 3 but are not numbered
    // consecutively around it; consecutive numbering makes x0^T k vanish.
    constexpr int kSlot[8] = {0, 1, 2, 3, 4, 5, 7, 6};
    Vector p0(16);
    for (int i = 0; i < 8; ++i) {
      const double a = 2.0 * std::numbers::pi * kSlot[i] / 8.0;
      p0[2 * i] = 3.0 * std::cos(a);
      p0[2 * i + 1] = 3.0 * std::sin(a);
    }
    return make("octagon-clusters", "Eight agents on an octagon: contraction at s = 0, then even/odd clusters at s = -1.",
                "cycle:8", SimMode::Planar, p0, {{{0.0, 0.0}, {1.0, -1.0}}, 30.0}, 10);
  }
  if (name == "dcycle-orbit") {
    Vector p0(10);
    p0 << -1.5, -3, 2.5, 0, -4, 2.5, 4, -3, 1.5, 3;
    const double theta = directed_cycle_oscillation(5).theta;
    return make("dcycle-orbit", "Directed 5-cycle: common elliptical orbit at s = 1/cos(16 pi/5), then rendezvous at s = 1.",
                "directed-cycle:5", SimMode::Planar, p0, {{{0.0, theta}, {50.0, 1.0}}, 100.0}, 10,
                std::make_pair(20.0, 50.0));
  }
  if (name == "dcycle-chord-orbit") {
    Vector p0(10);
    p0 << -4, -3, 2.5, 0, -4.5, 1, 4, -3.25, -2, 3;
    Json graph = graph_to_json(chorded_directed_cycle(false));
    return make("dcycle-chord-orbit", "Directed 5-cycle with arc 1->3: five closed orbits at s = -1.6889, then rendezvous at s = 1.",
                graph, SimMode::Planar, p0, {{{0.0, -1.6889}, {50.0, 1.0}}, 100.0}, 10,
                std::make_pair(20.0, 50.0));
  }
  throw Error(ErrorCode::InvalidParameter, "unknown scenario '" + name + "'");
}

ScenarioResult run_scenario(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult result;
  const IntegrateOptions options{sc.record_stride, false};
  result.trajectory = sc.mode == SimMode::Planar ? planar_sim(sc.graph, sc.schedule, sc.x0, sc.dt, options)
                                                 : integrate(sc.graph, sc.schedule, sc.x0, sc.dt, options);
  const Trajectory& traj = result.trajectory;

  Json summary = {{"scenario", sc.name},
                  {"graph", sc.graph.name()},
                  {"mode", to_string(sc.mode)},
                  {"status", to_string(traj.status)},
                  {"t_end", traj.times.back()},
                  {"final_state", to_std(traj.final_state())}};

  if (traj.status != RunStatus::Diverged) {
    const Rk4Stepper stepper(sc.graph, sc.mode == SimMode::Planar, sc.schedule.segments.back().s);
    const double rate = stepper.derivative(traj.final_state()).cwiseAbs().maxCoeff();
    result.converged = rate < 1e-6;
    try {
      result.limit = final_segment_limit(sc, traj);
    } catch (const Error& e) {
      summary["limit_error"] = e.what();
    }
  }
  summary["converged"] = result.converged;
  if (result.limit) {
    Json limit = {{"kind", to_string(result.limit->kind)},
                  {"from_t", result.limit->switch_time},
                  {"value", to_std(result.limit->value)}};
    if (!result.limit->groups.empty()) limit["groups"] = result.limit->groups;
    if (result.limit->kind != LimitKind::Divergent) {
      limit["max_deviation"] = (traj.final_state() - result.limit->value).cwiseAbs().maxCoeff();
    }
    summary["limit"] = std::move(limit);
  }

  if (sc.fit_window) {
    try {
      result.fit = oscillation_fit(traj, sc.fit_window->first, sc.fit_window->second);
      summary["fit"] = {{"window", {sc.fit_window->first, sc.fit_window->second}},
                        {"frequency", result.fit->frequency},
                        {"amplitudes", result.fit->amplitudes},
                        {"phases", result.fit->phases},
                        {"relative_residual", result.fit->relative_residual}};
    } catch (const Error& e) {
      summary["fit_error"] = e.what();
    }
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary["wall_time"] = result.wall_seconds;
  result.summary = std::move(summary);
  return result;
}

}  // namespace dcl
