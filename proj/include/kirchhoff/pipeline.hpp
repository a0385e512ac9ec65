#pragma once

#include <string>
#include <vector>

#include "kirchhoff/config.hpp"

namespace kirchhoff {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,
  exit_check_failed = 2,
  exit_inconclusive = 3,
  exit_nonconvergence = 4,
  exit_geometry = 5,
};

struct RunOutcome {
  int exit_code = exit_ok;
  Json report;
  std::vector<std::string> files;  ///< written paths, report last
};

/// Requested checks, or all five with default sampling when none are listed.
/// Report: config, hypotheses. Exit 0 / 2 (any fail) / 3 (any inconclusive).
RunOutcome cmd_check(const RunConfig& cfg);

/// Sphere estimate and negative-energy point. Exit 0 iff both hold, else 5.
RunOutcome cmd_geometry(const RunConfig& cfg);

/// Geometry, ball minimisation, mountain pass and distinctness. Writes
/// step1.csv, step2.csv and their *_trace.csv files next to report.json.
/// Exit 0 iff distinctness passes; 4 on nonconvergence, 5 on geometry
/// failure, 2 when both steps converge but the points are not distinct.
RunOutcome cmd_solve(const RunConfig& cfg);

}  // namespace kirchhoff
