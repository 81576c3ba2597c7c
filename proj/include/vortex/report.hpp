// Report serialization: JSON reports, CSV traces and SVG convergence plots.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vortex/continuation.hpp"

namespace vortex {

using Json = nlohmann::ordered_json;

/// Number or null for non-finite values.
Json json_number(double x);

Json diagnostics_json(const DiagnosticsRecord& d);
Json solve_report_json(const SolveReport& r);
Json stability_json(const StabilityReport& s);

inline constexpr const char* kTraceHeader = "eps,residual_sup,sup_log_f,apriori_margin,energy_gap,cauchy_increment,newton_iters";

std::string trace_csv(const std::vector<TraceRow>& trace);
/// Reads the columns written by trace_csv; other diagnostics stay zero.
std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// Residual and sup|log f| against eps on log axes (eps = 0 rows skipped).
std::string convergence_svg(const std::vector<TraceRow>& trace, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace vortex
