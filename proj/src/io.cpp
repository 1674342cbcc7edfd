#include "dcl/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dcl/error.hpp"

namespace dcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

int required_int(const Json& doc, const char* key) {
  if (!doc.contains(key)) parse_error(std::string("missing integer field '") + key + "'");
  const Json& v = doc.at(key);
  if (!v.is_number_integer()) parse_error(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double number(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "-inf") return -kInf;
    if (s == "+inf" || s == "inf") return kInf;
  }
  parse_error(what + " must be a number");
}

Json number_to_json(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "+inf";
  return v;
}

// Field names carrying the size parameters of each family, in spec order.
const std::map<std::string, std::vector<const char*>>& family_fields() {
  static const std::map<std::string, std::vector<const char*>> kFields = {
      {"path", {"n"}},           {"cycle", {"n"}},
      {"wheel", {"n"}},          {"complete", {"n"}},
      {"star", {"n"}},           {"directed-path", {"n"}},
      {"dpath", {"n"}},          {"directed-cycle", {"n"}},
      {"dcycle", {"n"}},         {"hypercube", {"m"}},
      {"cube", {"m"}},           {"mtree", {"m", "depth"}},
      {"mary-tree", {"m", "depth"}}, {"kbip", {"m", "n"}},
      {"complete-bipartite", {"m", "n"}}, {"petersen", {}},
  };
  return kFields;
}

GraphFamily family_from_json(const Json& doc) {
  const auto& name = doc.at("family");
  if (!name.is_string()) parse_error("'family' must be a string");
  std::string spec = name.get<std::string>();
  if (spec.find(':') != std::string::npos) return GraphFamily::parse(spec);
  const auto it = family_fields().find(spec);
  if (it == family_fields().end()) parse_error("unknown family '" + spec + "'");
  for (const char* field : it->second) spec += ":" + std::to_string(required_int(doc, field));
  return GraphFamily::parse(spec);
}

std::string join_groups(const std::vector<std::vector<int>>& groups) {
  std::string out;
  for (const auto& grp : groups) {
    out += out.empty() ? "{" : " {";
    for (std::size_t i = 0; i < grp.size(); ++i) out += (i ? "," : "") + std::to_string(grp[i]);
    out += "}";
  }
  return out;
}

std::string format_polynomial(const Polynomial& p) {
  double peak = 0.0;
  for (double c : p) peak = std::max(peak, std::abs(c));
  std::string out;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double c = p[k];
    if (std::abs(c) <= 1e-10 * peak) continue;
    const double mag = std::abs(c);
    std::string term;
    const bool unit = k > 0 && std::abs(mag - 1.0) < 1e-12;
    if (!unit) term = format_number(mag);
    if (k >= 1) term += (unit ? "" : " ") + std::string("s");
    if (k >= 2) term += "^" + std::to_string(k);
    if (out.empty()) {
      out = (c < 0 ? "-" : "") + term;
    } else {
      out += (c < 0 ? " - " : " + ") + term;
    }
  }
  return out.empty() ? "0" : out;
}

std::string format_intervals(const std::vector<Interval>& ivs) {
  if (ivs.empty()) return "none";
  std::string out;
  for (const auto& iv : ivs) {
    if (!out.empty()) out += " ";
    out += "(" + format_number(iv.lo) + ", " + format_number(iv.hi) + ")";
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    parse_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

GraphSource graph_from_json(const Json& doc) {
  if (!doc.is_object()) parse_error("graph document must be a JSON object");
  try {
    if (doc.contains("family")) {
      const GraphFamily family = family_from_json(doc);
      return {generate_family(family), family};
    }
    const int n = required_int(doc, "n");
    const bool directed = doc.value("directed", false);
    if (!doc.contains("edges") || !doc.at("edges").is_array()) parse_error("missing 'edges' array");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        parse_error("each edge must be a pair of integers");
      }
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    const std::string name = doc.value("name", std::string("graph"));
    return {build_graph(n, edges, directed, name), std::nullopt};
  } catch (const Json::exception& e) {
    parse_error(std::string("malformed graph document: ") + e.what());
  }
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, e.to});
  return {{"name", g.name()}, {"n", g.order()}, {"directed", g.directed()}, {"edges", edges}};
}

Json family_to_json(const GraphFamily& f) {
  const std::string spec = f.spec();
  Json doc = {{"family", spec.substr(0, spec.find(':'))}};
  switch (f.kind) {
    case FamilyKind::MaryTree: doc["m"] = f.a; doc["depth"] = f.b; break;
    case FamilyKind::Hypercube: doc["m"] = f.a; break;
    case FamilyKind::CompleteBipartite: doc["m"] = f.a; doc["n"] = f.b; break;
    case FamilyKind::Petersen: break;
    default: doc["n"] = f.a; break;
  }
  return doc;
}

GraphSource load_graph(const std::string& path) { return graph_from_json(read_json_file(path)); }

GraphSource resolve_graph(const std::string& source) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(source, ec)) return load_graph(source);
  const GraphFamily family = GraphFamily::parse(source);
  return {generate_family(family), family};
}

Json interval_to_json(const Interval& iv) { return {number_to_json(iv.lo), number_to_json(iv.hi)}; }

Interval interval_from_json(const Json& doc) {
  if (!doc.is_array() || doc.size() != 2) parse_error("interval must be a [lo, hi] pair");
  return {number(doc[0], "interval end"), number(doc[1], "interval end")};
}

Json report_to_json(const StabilityReport& r) {
  Json doc = {{"graph", r.graph}, {"method", to_string(r.method)}};
  Json stable = Json::array(), unstable = Json::array(), marginal = Json::array();
  for (const auto& iv : r.stable) stable.push_back(interval_to_json(iv));
  for (const auto& iv : r.unstable) unstable.push_back(interval_to_json(iv));
  for (const auto& m : r.marginal) {
    Json p = {{"s", m.s}, {"kind", m.kind}, {"groups", m.groups}};
    if (m.frequency) p["frequency"] = *m.frequency;
    marginal.push_back(std::move(p));
  }
  doc["stable"] = std::move(stable);
  doc["unstable"] = std::move(unstable);
  doc["marginal"] = std::move(marginal);
  if (r.q) doc["q"] = *r.q;
  if (r.range) doc["range"] = interval_to_json(*r.range);
  doc["warnings"] = r.warnings;
  return doc;
}

StabilityReport report_from_json(const Json& doc) {
  try {
    StabilityReport r;
    r.graph = doc.at("graph").get<std::string>();
    const std::string method = doc.at("method").get<std::string>();
    if (method == "closed-form") {
      r.method = StabilityMethod::ClosedForm;
    } else if (method == "qep-sign-rule") {
      r.method = StabilityMethod::QepSignRule;
    } else if (method == "sweep") {
      r.method = StabilityMethod::Sweep;
    } else {
      parse_error("unknown method '" + method + "'");
    }
    for (const auto& iv : doc.at("stable")) r.stable.push_back(interval_from_json(iv));
    for (const auto& iv : doc.at("unstable")) r.unstable.push_back(interval_from_json(iv));
    for (const auto& m : doc.at("marginal")) {
      MarginalPoint p;
      p.s = m.at("s").get<double>();
      p.kind = m.at("kind").get<std::string>();
      p.groups = m.value("groups", std::vector<std::vector<int>>{});
      if (m.contains("frequency")) p.frequency = m.at("frequency").get<double>();
      r.marginal.push_back(std::move(p));
    }
    if (doc.contains("q")) r.q = doc.at("q").get<Polynomial>();
    if (doc.contains("range")) r.range = interval_from_json(doc.at("range"));
    r.warnings = doc.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const Json::exception& e) {
    parse_error(std::string("malformed report: ") + e.what());
  }
}

std::string format_report(const StabilityReport& r) {
  std::ostringstream out;
  out << "graph:    " << r.graph << "\n";
  out << "method:   " << to_string(r.method) << "\n";
  if (r.range) out << "range:    [" << format_number(r.range->lo) << ", " << format_number(r.range->hi) << "]\n";
  if (r.q) out << "q(s):     " << format_polynomial(*r.q) << "\n";
  out << "stable:   " << format_intervals(r.stable) << "\n";
  out << "unstable: " << format_intervals(r.unstable) << "\n";
  out << "marginal:" << (r.marginal.empty() ? " none" : "") << "\n";
  for (const auto& m : r.marginal) {
    out << "  s = " << format_number(m.s) << "  " << m.kind;
    if (m.frequency) out << "  f = " << format_number(*m.frequency) << " Hz";
    if (!m.groups.empty()) out << "  groups " << join_groups(m.groups);
    out << "\n";
  }
  for (const auto& w : r.warnings) out << "warning:  " << w << "\n";
  return out.str();
}

Json spectrum_to_json(const ClosedFormSpectrum& spectrum) {
  Json values = Json::array();
  for (const auto& e : spectrum.eigenvalues) {
    values.push_back({{"re", e.value.real()}, {"im", e.value.imag()}, {"multiplicity", e.multiplicity}});
  }
  return {{"family", spectrum.family.spec()},
          {"s", spectrum.s},
          {"provenance", spectrum.provenance == SpectrumProvenance::ClosedForm ? "closed-form" : "numeric"},
          {"eigenvalues", values}};
}

Json schedule_to_json(const SwitchSchedule& schedule) {
  Json segs = Json::array();
  for (const auto& seg : schedule.segments) segs.push_back({{"t", seg.t_start}, {"s", seg.s}});
  return segs;
}

SwitchSchedule schedule_from_json(const Json& segments, double total_time) {
  if (!segments.is_array()) parse_error("schedule must be an array of {t, s} segments");
  SwitchSchedule schedule;
  schedule.total_time = total_time;
  for (const auto& seg : segments) {
    if (seg.is_array() && seg.size() == 2) {
      schedule.segments.push_back({number(seg[0], "segment start"), number(seg[1], "segment s")});
    } else if (seg.is_object() && seg.contains("t") && seg.contains("s")) {
      schedule.segments.push_back({number(seg.at("t"), "segment start"), number(seg.at("s"), "segment s")});
    } else {
      parse_error("schedule segment must be {\"t\": ..., \"s\": ...}");
    }
  }
  try {
    schedule.validate();
  } catch (const Error& e) {
    parse_error(e.what());
  }
  return schedule;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "time,s";
  const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
  if (traj.planar) {
    for (Eigen::Index i = 0; i < dim / 2; ++i) out << ",p" << i + 1 << "x,p" << i + 1 << "y";
  } else {
    for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i + 1;
  }
  out << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k]);
    out << ",";
    put(traj.s_values[k]);
    for (Eigen::Index i = 0; i < dim; ++i) {
      out << ",";
      put(traj.states[k][i]);
    }
    out << "\n";
  }
}

}  // namespace dcl
