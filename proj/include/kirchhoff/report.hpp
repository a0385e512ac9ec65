#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kirchhoff/checkers.hpp"
#include "kirchhoff/config.hpp"
#include "kirchhoff/geometry.hpp"
#include "kirchhoff/solvers.hpp"

namespace kirchhoff {

/// %.17g, so that reading the text back gives the same double.
std::string format_double(double v);

/// Non-finite values become null.
Json number(double v);

Json to_json(const ConditionReport& rep);
Json to_json(const GeometryReport& rep);
Json to_json(const CriticalPoint& cp, double h_norm);
Json to_json(const DistinctReport& rep);

/// Library and build identification for the "versions" section.
Json versions();

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string solution_csv(std::span<const double> r, std::span<const double> u);
std::string trace_csv(const std::vector<TraceRow>& trace);

/// Pretty JSON with a trailing newline.
std::string dump_report(const Json& report);

/// Copy of `report` without "timings", for reproducibility comparisons.
Json strip_timings(const Json& report);

}  // namespace kirchhoff
