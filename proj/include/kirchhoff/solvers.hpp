#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/variational.hpp"

namespace kirchhoff {

struct ArmijoParams {
  double sigma = 1e-4;  ///< sufficient-decrease fraction of the slope
  double shrink = 0.5;
};

struct SolverConfig {
  double tol_residual = 1e-6;
  double tol_cerami = 1e-5;
  int max_iters = 10000;
  ArmijoParams armijo;
  int path_points = 41;
  double deform_step = 0.1;
  double distinct_delta = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on nonpositive tolerances or an even/short path.
  void validate() const;
};

enum class PointKind { local_min, mountain_pass };

std::string to_string(PointKind kind);

struct TraceRow {
  int iter = 0;
  double level = 0.0;
  double residual = 0.0;
  double cerami = 0.0;
};

struct CriticalPoint {
  Eigen::VectorXd u;
  double level = 0.0;
  double residual = 0.0;  ///< dual norm, or projected-gradient norm on the sphere
  double cerami = 0.0;
  int iters = 0;
  PointKind kind = PointKind::local_min;
  bool converged = false;
  bool degenerate = false;  ///< local-min search never went below 0
  bool on_boundary = false;
  std::vector<TraceRow> trace;
  std::string note;
};

/// Projected H-gradient descent in the closed ball |u|_H <= rho from `start`
/// (pulled into the ball first). Trial steps start from a Barzilai-Borwein
/// estimate and backtrack until Armijo holds, so the level trace never rises.
CriticalPoint minimize_in_ball(const VariationalProblem& I, double rho, const Eigen::VectorXd& start,
                               const SolverConfig& config);

struct MPPath {
  std::vector<Eigen::VectorXd> points;
  int max_index = 0;
  std::vector<double> level_profile;
};

struct MountainPassResult {
  CriticalPoint point;
  MPPath path;
  int monotonicity_violations = 0;  ///< path-max increases beyond 1e-12 relative
  int reparametrisations = 0;
  int rejected_reparametrisations = 0;  ///< would have raised the path maximum
};

/// Path deformation from the segment [0, e]. Each iteration moves only the
/// path maximiser (refined along its two adjacent segments) by one Armijo
/// step along the negative Riesz gradient, then re-spaces the path in H when
/// consecutive distances leave [1/2, 2] times uniform. Refinement and
/// re-spacing are skipped when they would raise the path maximum, so the
/// maximum never increases. Endpoints never move.
/// Throws PathCollapseError when the path maximum drops below eta / 2.
MountainPassResult mountain_pass(const VariationalProblem& I, const Eigen::VectorXd& e,
                                 const SolverConfig& config, std::optional<double> eta = std::nullopt);

struct DistinctReport {
  bool pass = false;
  double level1 = 0.0;
  double level2 = 0.0;
  double distance = 0.0;
  std::string reason;
};

DistinctReport verify_distinct(const VariationalProblem& I, const CriticalPoint& cp1,
                               const CriticalPoint& cp2, const SolverConfig& config);

}  // namespace kirchhoff
