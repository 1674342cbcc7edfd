#include "dcl/analysis.hpp"

#include "dcl/error.hpp"

namespace dcl {

AnalysisMethod analysis_method_from_string(const std::string& text) {
  if (text == "auto") return AnalysisMethod::Auto;
  if (text == "closed-form") return AnalysisMethod::ClosedForm;
  if (text == "qep-sign-rule" || text == "sign-rule") return AnalysisMethod::SignRule;
  if (text == "sweep") return AnalysisMethod::Sweep;
  throw Error(ErrorCode::InvalidParameter, "unknown analysis method '" + text + "'");
}

StabilityReport numeric_report(const Graph& g) {
  if (g.directed() || !structure_probe(g).connected) return sweep_report(g);
  try {
    return stability_intervals(g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IllConditionedInterpolation) throw;
    StabilityReport report = sweep_report(g);
    report.warnings.push_back(std::string("sign rule unavailable, fell back to a sweep: ") + e.what());
    return report;
  }
}

StabilityReport analyze(const GraphSource& source, AnalysisMethod method) {
  switch (method) {
    case AnalysisMethod::ClosedForm:
      if (!source.family) throw Error(ErrorCode::InvalidParameter, "closed form needs a named family");
      return stability_report(family_stability(*source.family));
    case AnalysisMethod::SignRule:
      return stability_intervals(source.graph);
    case AnalysisMethod::Sweep:
      return sweep_report(source.graph);
    case AnalysisMethod::Auto:
      break;
  }
  if (source.family) {
    try {
      return stability_report(family_stability(*source.family));
    } catch (const Error&) {
      // no tabulated closed form for this member; analyze numerically
    }
  }
  return numeric_report(source.graph);
}

}  // namespace dcl
