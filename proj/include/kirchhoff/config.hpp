#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "kirchhoff/checkers.hpp"
#include "kirchhoff/geometry.hpp"
#include "kirchhoff/model.hpp"
#include "kirchhoff/solvers.hpp"

namespace kirchhoff {

using Json = nlohmann::ordered_json;

/// The shipped config schema (schema/config.schema.json), embedded at build time.
std::string_view config_schema_text();
const Json& config_schema();

/// JSON pointer -> 1-based source line, recorded while parsing.
using LineMap = std::map<std::string, int>;

/// Where each part of a config document came from, for error messages.
struct SourceMap {
  std::string origin = "config";
  LineMap lines;
  std::map<std::string, std::string> overrides;  ///< pointer -> "--set K=V"

  /// "origin:line" for the pointer or its nearest recorded ancestor, or the
  /// --set assignment that produced it.
  std::string locate(const std::string& pointer) const;
};

/// Throws ConfigError carrying "<origin>:<line>:<col>: ..." on syntax errors.
Json parse_json_with_lines(std::string_view text, SourceMap& source);

/// Validates against the supported schema subset (type, enum, properties,
/// additionalProperties, required, items, minItems, minimum, maximum and the
/// exclusive bounds) and fills "default" values in place.
void validate_and_fill(Json& doc, const Json& schema, const SourceMap& source);

/// Applies KEY=VALUE with a dotted KEY ("grid.n", "checks.0.range"). VALUE
/// is read as JSON when it parses, otherwise as a string. Returns the JSON
/// pointer that was written.
std::string apply_override(Json& doc, std::string_view assignment);

struct CheckRequest {
  std::string condition;
  SampleSpec samples;
  double r0 = 1.0;
  double divergence_factor = 10.0;
  std::vector<double> mu;
  V1Options v1;
};

struct RunConfig {
  Json effective;  ///< post-default config, echoed into reports
  ProblemSpec problem;  ///< unshifted
  SolverConfig solver;
  bool truncation_check = false;
  GeometryOptions geometry;
  std::vector<CheckRequest> checks;
  std::string output_dir;
  std::uint64_t seed = 0;
};

/// Reads, overrides, validates and converts. Any problem surfaces as ConfigError.
RunConfig load_config(std::string_view text, std::string_view origin,
                      const std::vector<std::string>& overrides = {},
                      std::optional<std::uint64_t> seed = std::nullopt,
                      std::optional<std::string> output_dir = std::nullopt);

RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {},
                           std::optional<std::uint64_t> seed = std::nullopt,
                           std::optional<std::string> output_dir = std::nullopt);

/// Converts a validated, default-filled document. Kind-specific defaults
/// (potential and term parameters) are filled into the echo here.
RunConfig from_json(Json doc, const SourceMap& source = {});

}  // namespace kirchhoff
