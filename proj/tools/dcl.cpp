#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "dcl/analysis.hpp"
#include "dcl/error.hpp"
#include "dcl/scenario.hpp"
#include "dcl/server.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitAnalysis = 3;

int exit_code_for(dcl::ErrorCode code) {
  using dcl::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidGraph:
    case ErrorCode::InvalidParameter:
    case ErrorCode::SelfLoop:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::VertexOutOfRange:
    case ErrorCode::ParameterOutOfRange:
    case ErrorCode::StepMismatch:
    case ErrorCode::DimensionMismatch:
      return kExitParse;
    default:
      return kExitAnalysis;
  }
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("dcl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DCL_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

dcl::GraphSource graph_source(const std::string& positional, const std::string& family) {
  if (!family.empty() && !positional.empty()) {
    throw dcl::Error(dcl::ErrorCode::InvalidParameter, "give either a graph file or --family, not both");
  }
  if (!family.empty()) {
    const auto f = dcl::GraphFamily::parse(family);
    return {dcl::generate_family(f), f};
  }
  if (positional.empty()) throw dcl::Error(dcl::ErrorCode::InvalidParameter, "no graph given");
  return dcl::resolve_graph(positional);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw dcl::Error(dcl::ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

std::string classification(const dcl::Graph& g, double s) {
  return dcl::to_string(dcl::classify_at(g, s));
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Deformed consensus protocol lab"};
  app.require_subcommand(1);

  std::string graph_arg;
  std::string family_arg;
  std::string format = "text";
  std::string method = "auto";

  auto* analyze = app.add_subcommand("analyze", "Print the stability report of a graph");
  analyze->add_option("graph", graph_arg, "Graph file or family spec");
  analyze->add_option("--family", family_arg, "Family spec, e.g. cycle:5 or mtree:2:3");
  analyze->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--method", method)->check(CLI::IsMember({"auto", "closed-form", "qep-sign-rule", "sweep"}));

  double s_value = 1.0;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of -Delta(s)");
  spectrum->add_option("graph", graph_arg, "Graph file or family spec");
  spectrum->add_option("--family", family_arg, "Family spec");
  spectrum->add_option("-s,--s", s_value, "Parameter value")->required();
  spectrum->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  std::string scenario_arg;
  std::string csv_path;
  std::string summary_path;
  bool list_builtin = false;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file or a built-in scenario");
  simulate->add_option("scenario", scenario_arg, "Scenario file or built-in name (path-split, octagon-clusters, dcycle-orbit, dcycle-chord-orbit)");
  simulate->add_option("--csv", csv_path, "Trajectory CSV path (default: <name>.csv)");
  simulate->add_option("--summary", summary_path, "Also write the JSON summary to this path");
  simulate->add_flag("--list", list_builtin, "List built-in scenarios");
  bool print_scenario = false;
  simulate->add_flag("--print", print_scenario, "Print the scenario document instead of running it");

  double from = 0.0, to = 0.0, step = 1e-2;
  auto* sweep = app.add_subcommand("sweep", "Locate a stability threshold in a bracket");
  sweep->add_option("graph", graph_arg, "Graph file or family spec");
  sweep->add_option("--family", family_arg, "Family spec");
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--step", step)->check(CLI::PositiveNumber);

  std::string spec_arg;
  std::string out_path;
  bool explicit_edges = false;
  auto* family = app.add_subcommand("family", "Write a family graph document");
  family->add_option("spec", spec_arg, "Family spec")->required();
  family->add_option("-o,--output", out_path, "Output file (default: stdout)");
  family->add_flag("--edges", explicit_edges, "Write the explicit edge list instead of the family reference");

  dcl::ServerOptions server_opts;
  auto* serve = app.add_subcommand("serve", "Run the steering service");
  serve->add_option("--address", server_opts.address);
  serve->add_option("--port", server_opts.port);
  serve->add_option("--threads", server_opts.threads)->check(CLI::Range(1, 64));
  serve->add_option("--max-sessions", server_opts.max_sessions);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*analyze) {
      const auto source = graph_source(graph_arg, family_arg);
      spdlog::info("analyzing {} ({} vertices)", source.graph.name(), source.graph.order());
      const auto report = dcl::analyze(source, dcl::analysis_method_from_string(method));
      if (format == "json") {
        std::cout << dcl::report_to_json(report).dump(2) << "\n";
      } else {
        std::cout << dcl::format_report(report);
      }
    } else if (*spectrum) {
      const auto source = graph_source(graph_arg, family_arg);
      dcl::Json doc;
      if (source.family) {
        doc = dcl::spectrum_to_json(dcl::family_spectrum(*source.family, s_value));
      } else {
        const auto values = dcl::sorted_spectrum(
            [&] {
              const dcl::ComplexVector ev = dcl::eigenvalues(-dcl::deformed_laplacian(source.graph, s_value));
              return std::vector<dcl::Complex>(ev.data(), ev.data() + ev.size());
            }());
        dcl::Json list = dcl::Json::array();
        for (const auto& v : values) list.push_back({{"re", v.real()}, {"im", v.imag()}, {"multiplicity", 1}});
        doc = {{"graph", source.graph.name()}, {"s", s_value}, {"provenance", "numeric"}, {"eigenvalues", list}};
      }
      if (format == "json") {
        std::cout << doc.dump(2) << "\n";
      } else {
        std::cout << "spectrum of -Delta(s) at s = " << dcl::format_number(s_value) << " ("
                  << doc.value("provenance", std::string("numeric")) << ")\n";
        for (const auto& e : doc.at("eigenvalues")) {
          const double im = e.at("im").get<double>();
          std::cout << "  " << dcl::format_number(e.at("re").get<double>());
          if (im != 0.0) std::cout << (im > 0 ? " + " : " - ") << dcl::format_number(std::abs(im)) << "i";
          const int mult = e.value("multiplicity", 1);
          if (mult > 1) std::cout << "  (x" << mult << ")";
          std::cout << "\n";
        }
        std::cout << "verdict: " << classification(source.graph, s_value) << "\n";
      }
    } else if (*simulate) {
      if (list_builtin) {
        for (const auto& name : dcl::builtin_scenario_names()) {
          std::cout << name << "  " << dcl::builtin_scenario(name).description << "\n";
        }
        return 0;
      }
      if (scenario_arg.empty()) throw dcl::Error(dcl::ErrorCode::InvalidParameter, "no scenario given");
      dcl::Scenario scenario;
      bool builtin = false;
      for (const auto& name : dcl::builtin_scenario_names()) builtin = builtin || name == scenario_arg;
      scenario = builtin ? dcl::builtin_scenario(scenario_arg) : dcl::load_scenario(scenario_arg);
      if (print_scenario) {
        std::cout << dcl::scenario_to_json(scenario).dump(2) << "\n";
        return 0;
      }
      spdlog::info("running scenario {} for T = {}", scenario.name, scenario.schedule.total_time);
      const auto result = dcl::run_scenario(scenario);
      const std::string csv = csv_path.empty() ? scenario.name + ".csv" : csv_path;
      {
        std::ofstream out(csv);
        if (!out) throw dcl::Error(dcl::ErrorCode::ParseError, "cannot write " + csv);
        dcl::write_csv(result.trajectory, out);
      }
      dcl::Json summary = result.summary;
      summary["csv"] = csv;
      if (!summary_path.empty()) write_text(summary_path, summary.dump(2) + "\n");
      std::cout << summary.dump(2) << "\n";
    } else if (*sweep) {
      const auto source = graph_source(graph_arg, family_arg);
      const double threshold = dcl::sweep_threshold(source.graph, from, to, step);
      const double probe = std::max(1e-4, 1e-3 * std::abs(to - from));
      const double lo = std::max(std::min(from, to), threshold - probe);
      const double hi = std::min(std::max(from, to), threshold + probe);
      std::cout << "threshold: " << dcl::format_number(threshold) << "\n"
                << "  s = " << dcl::format_number(lo) << ": " << classification(source.graph, lo) << "\n"
                << "  s = " << dcl::format_number(hi) << ": " << classification(source.graph, hi) << "\n";
    } else if (*family) {
      const auto f = dcl::GraphFamily::parse(spec_arg);
      f.validate();
      const dcl::Json doc = explicit_edges ? dcl::graph_to_json(dcl::generate_family(f)) : dcl::family_to_json(f);
      if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        write_text(out_path, doc.dump(2) + "\n");
      }
    } else if (*serve) {
      dcl::Server server(server_opts);
      server.start();
      spdlog::set_level(std::getenv("DCL_LOG") ? spdlog::get_level() : spdlog::level::info);
      spdlog::info("steering service listening on http://{}:{}", server_opts.address, server.port());
      server.wait();
      spdlog::info("steering service stopped");
    }
  } catch (const dcl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return 0;
}
