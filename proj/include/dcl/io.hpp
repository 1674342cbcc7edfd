#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "dcl/dynamics.hpp"
#include "dcl/graph.hpp"
#include "dcl/qep.hpp"
#include "dcl/spectra.hpp"

namespace dcl {

using Json = nlohmann::json;

/// A graph together with the family it came from, when known.
struct GraphSource {
  Graph graph;
  std::optional<GraphFamily> family;
};

/// Accepts {"n", "directed", "edges": [[i, j], ...], "name"?} or a family
/// document such as {"family": "cycle", "n": 8} or {"family": "mtree", "m": 2,
/// "depth": 3}. Throws ParseError or InvalidGraph.
GraphSource graph_from_json(const Json& doc);
Json graph_to_json(const Graph& g);
Json family_to_json(const GraphFamily& family);

/// Reads a graph document from disk. Throws ParseError.
GraphSource load_graph(const std::string& path);

/// A family spec (`cycle:8`) or a path to a graph document.
GraphSource resolve_graph(const std::string& source);

/// Infinite interval ends become the strings "-inf" / "+inf".
Json interval_to_json(const Interval& iv);
Interval interval_from_json(const Json& doc);

Json report_to_json(const StabilityReport& report);
StabilityReport report_from_json(const Json& doc);

/// Human-readable report with 6 significant digits.
std::string format_report(const StabilityReport& report);

/// printf("%.6g"), with "inf"/"-inf" for infinities.
std::string format_number(double v);

Json spectrum_to_json(const ClosedFormSpectrum& spectrum);

/// Segments as [{"t": 0, "s": -1}, {"t": 3, "s": 0}]; the total time is kept separately.
Json schedule_to_json(const SwitchSchedule& schedule);
SwitchSchedule schedule_from_json(const Json& segments, double total_time);

/// CSV with header time,s,x1,...,xn or time,s,p1x,p1y,...; values to 9 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);

/// Reads a whole file; throws ParseError when unreadable.
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace dcl
