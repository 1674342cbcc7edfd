#pragma once

#include <string>

#include "dcl/io.hpp"
#include "dcl/qep.hpp"

namespace dcl {

enum class AnalysisMethod { Auto, ClosedForm, SignRule, Sweep };
AnalysisMethod analysis_method_from_string(const std::string& text);

/// Auto picks the closed form for named families, the sign rule for other
/// connected undirected graphs (falling back to a sweep when q(s) cannot be
/// interpolated reliably) and a sweep for everything else.
/// ClosedForm throws InvalidParameter when the source is not a named family.
StabilityReport analyze(const GraphSource& source, AnalysisMethod method = AnalysisMethod::Auto);

/// Numeric report only: sign rule where it applies, otherwise a sweep.
StabilityReport numeric_report(const Graph& g);

}  // namespace dcl
