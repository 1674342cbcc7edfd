#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcl/dynamics.hpp"
#include "dcl/io.hpp"

namespace dcl {

enum class SimMode { Line, Planar };
std::string to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& text);

/// A reproducible simulation: graph, switching schedule and initial state.
struct Scenario {
  std::string name;
  std::string description;
  Json graph_doc;  ///< family spec string or graph document, kept verbatim for round trips
  Graph graph{1, {}, false};
  SimMode mode = SimMode::Line;
  Vector x0;
  double dt = 1e-3;
  SwitchSchedule schedule;
  int record_stride = 1;
  std::optional<std::pair<double, double>> fit_window;
};

/// {"name", "graph", "mode", "x0", "dt", "T", "schedule", "record_stride"?, "fit_window"?}.
/// Throws ParseError, and StepMismatch when dt does not divide the schedule.
Scenario scenario_from_json(const Json& doc);
Json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

std::vector<std::string> builtin_scenario_names();
/// path-split, octagon-clusters, dcycle-orbit, dcycle-chord-orbit. Throws InvalidParameter for unknown names.
Scenario builtin_scenario(const std::string& name);

/// Graph of dcycle-chord-orbit: the directed 5-cycle with the extra arc 1 -> 3.
Graph chorded_directed_cycle(bool reversed_chord);

/// Expected end state: the limit of the last segment's dynamics started from
/// the state at the last switching time, per coordinate in planar mode.
struct ScenarioLimit {
  LimitKind kind = LimitKind::Zero;
  Vector value;                             ///< same layout as the state
  std::vector<std::vector<int>> groups;     ///< vertex groups of the marginal mode
  double switch_time = 0.0;
};

struct ScenarioResult {
  Trajectory trajectory;
  std::optional<ScenarioLimit> limit;       ///< absent when not predictable
  std::optional<OscillationFit> fit;        ///< when the scenario names a fit window
  bool converged = false;                   ///< ||dx/dt||_inf < 1e-6 at the end
  double wall_seconds = 0.0;
  Json summary;
};

ScenarioResult run_scenario(const Scenario& scenario);

}  // namespace dcl
