#include "kirchhoff/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/kernels.hpp"

namespace kirchhoff {

namespace {

using Vec = Eigen::VectorXd;

constexpr double kMinStep = 1e-20;
constexpr double kMaxStep = 1e12;

// Energy differences below this are roundoff.
double roundoff(double level) { return 1e-13 * (1.0 + std::abs(level)); }

struct StepResult {
  bool accepted = false;
  Vec v;
  double level = 0.0;
  double step = 0.0;
};

// Backtracking along t -> project(u - t g). Armijo against the slope d.(v - u);
// once the energy difference sinks into roundoff the approximate condition
// d(v).(v - u) <= (2 sigma - 1) d(u).(v - u) of Hager and Zhang takes over.
template <typename Project>
StepResult armijo(const VariationalProblem& I, const Vec& u, double level, const Vec& d, const Vec& g,
                  double step, const ArmijoParams& ap, Project&& project) {
  StepResult r;
  const double eps = roundoff(level);
  for (double t = step; t >= kMinStep; t *= ap.shrink) {
    Vec v = project(u - t * g);
    const Vec delta = v - u;
    const double slope = d.dot(delta);
    if (!(slope < 0.0)) continue;
    const double lv = I.energy(v);
    bool ok = lv <= level + ap.sigma * slope;
    if (!ok && lv <= level + eps) ok = I.derivative(v).dot(delta) <= (2.0 * ap.sigma - 1.0) * slope;
    if (ok) {
      r.accepted = true;
      r.v = std::move(v);
      r.level = lv;
      r.step = t;
      return r;
    }
  }
  return r;
}

double bb_step(const VariationalProblem& I, const Vec& s, const Vec& y, double fallback) {
  const double sy = I.inner(s, y);
  if (sy > 0.0) return std::clamp(I.inner(s, s) / sy, kMinStep, kMaxStep);
  return std::min(2.0 * fallback, kMaxStep);
}

int argmax_interior(const std::vector<double>& levels) {
  int m = 1;
  for (int k = 2; k + 1 < static_cast<int>(levels.size()); ++k)
    if (levels[k] > levels[m]) m = k;
  return m;
}

// Maximiser of s -> I(p + s t) on [0, len], given a positive slope at 0: the
// first sign change of the slope is polished with TOMS 748; without one the
// far end is returned.
std::pair<double, double> line_max(const VariationalProblem& I, const Vec& p, const Vec& t, double len) {
  auto slope = [&](double s) { return I.derivative(p + s * t).dot(t); };
  constexpr int kProbe = 8;
  double lo = 0.0;
  double flo = slope(0.0);
  for (int j = 1; j <= kProbe; ++j) {
    const double hi = len * j / kProbe;
    const double fhi = slope(hi);
    if (fhi <= 0.0) {
      double s = hi;
      if (fhi < 0.0) {
        std::uintmax_t iters = 200;
        const auto [x0, x1] = boost::math::tools::toms748_solve(
            slope, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
        s = I.energy(p + x0 * t) >= I.energy(p + x1 * t) ? x0 : x1;
      }
      return {s, I.energy(p + s * t)};
    }
    lo = hi;
    flo = fhi;
  }
  return {len, I.energy(p + len * t)};
}

// Unit H-tangent of the path at interior point m: the chord p_{m+1} - p_{m-1}.
Vec chord_tangent(const VariationalProblem& I, const std::vector<Vec>& pts, int m) {
  Vec t = pts[m + 1] - pts[m - 1];
  const double tn = I.norm(t);
  if (tn > 0.0) t /= tn;
  return t;
}

// Moves p_m towards the maximum of I on the line through it along the chord,
// within the neighbour distances, so that the gradient there has (almost) no
// chord component. The move stops where I reaches `cap`, the current path
// maximum, so refinement never raises the maximum.
void refine_max(const VariationalProblem& I, MPPath& path, double cap) {
  const int m = path.max_index;
  auto& pts = path.points;
  const Vec tangent = chord_tangent(I, pts, m);
  const double slope0 = I.derivative(pts[m]).dot(tangent);
  if (slope0 == 0.0 || !(I.norm(tangent) > 0.0)) return;
  const Vec dir = slope0 > 0.0 ? Vec(tangent) : Vec(-tangent);
  const double len = I.norm(pts[slope0 > 0.0 ? m + 1 : m - 1] - pts[m]);
  if (!(len > 0.0)) return;
  auto [s, level] = line_max(I, pts[m], dir, len);
  if (!(level > path.level_profile[m])) return;
  if (level > cap) {
    if (!(path.level_profile[m] < cap)) return;
    // I(p + s dir) rises on [0, s]; stop at the crossing of the cap.
    auto excess = [&](double x) { return I.energy(pts[m] + x * dir) - cap; };
    std::uintmax_t iters = 200;
    const auto [x0, x1] = boost::math::tools::toms748_solve(excess, 0.0, s, path.level_profile[m] - cap,
                                                            level - cap,
                                                            boost::math::tools::eps_tolerance<double>(52), iters);
    (void)x1;
    s = x0;
    level = I.energy(pts[m] + s * dir);
    if (!(level <= cap) || !(level > path.level_profile[m])) return;
  }
  pts[m] += s * dir;
  path.level_profile[m] = level;
}

bool spacing_ok(const std::vector<double>& dist) {
  double total = 0.0;
  for (double d : dist) total += d;
  const double mean = total / static_cast<double>(dist.size());
  return std::all_of(dist.begin(), dist.end(),
                     [&](double d) { return d >= 0.5 * mean && d <= 2.0 * mean; });
}

// Arclength re-spacing of points[first..last] (both kept) along the current
// polyline.
void respace(const VariationalProblem& I, std::vector<Vec>& pts, int first, int last) {
  const int intervals = last - first;
  if (intervals < 2) return;
  std::vector<double> cum(intervals + 1, 0.0);
  for (int k = 0; k < intervals; ++k)
    cum[k + 1] = cum[k] + I.norm(pts[first + k + 1] - pts[first + k]);
  if (!(cum.back() > 0.0)) return;
  std::vector<Vec> out(intervals + 1);
  out.front() = pts[first];
  out.back() = pts[last];
  int seg = 0;
  for (int j = 1; j < intervals; ++j) {
    const double target = cum.back() * j / intervals;
    while (seg < intervals - 1 && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double s = len > 0.0 ? (target - cum[seg]) / len : 0.0;
    out[j] = (1.0 - s) * pts[first + seg] + s * pts[first + seg + 1];
  }
  for (int j = 1; j < intervals; ++j) pts[first + j] = std::move(out[j]);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0)) throw ConfigError("tol_residual must be positive");
  if (!(tol_cerami > 0.0)) throw ConfigError("tol_cerami must be positive");
  if (max_iters <= 0) throw ConfigError("max_iters must be positive");
  if (!(armijo.sigma > 0.0 && armijo.sigma < 0.5)) throw ConfigError("armijo sigma must lie in (0, 1/2)");
  if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) throw ConfigError("armijo shrink must lie in (0, 1)");
  if (path_points < 5 || path_points % 2 == 0) throw ConfigError("path_points must be odd and at least 5");
  if (!(deform_step > 0.0)) throw ConfigError("deform_step must be positive");
  if (!(distinct_delta > 0.0)) throw ConfigError("distinct_delta must be positive");
}

std::string to_string(PointKind kind) {
  return kind == PointKind::local_min ? "local-min" : "mountain-pass";
}

CriticalPoint minimize_in_ball(const VariationalProblem& I, double rho, const Vec& start,
                               const SolverConfig& config) {
  config.validate();
  if (!(rho > 0.0)) throw ConfigError("ball radius must be positive");
  if (start.size() != I.dimension()) throw DimensionError("start has the wrong dimension");

  auto project = [&](Vec v) {
    const double nv = I.norm(v);
    if (nv > rho) v *= rho / nv;
    return v;
  };

  CriticalPoint cp;
  cp.kind = PointKind::local_min;
  Vec u = project(start);
  double level = I.energy(u);
  double step = config.deform_step;
  Vec prev_u;
  Vec prev_g;

  for (int iter = 0;; ++iter) {
    const Vec d = I.derivative(u);
    const Vec g = I.riesz(d);
    const double dual = std::sqrt(std::max(0.0, d.dot(g)));
    const double nu = I.norm(u);
    double residual = dual;
    cp.on_boundary = false;
    if (nu >= rho * (1.0 - 1e-12)) {
      const double gu = I.inner(g, u);
      if (gu < 0.0) {
        residual = I.norm(g - (gu / (nu * nu)) * u);
        cp.on_boundary = true;
      }
    }
    const double cerami = (1.0 + nu) * residual;
    cp.trace.push_back({iter, level, residual, cerami});
    cp.iters = iter;
    cp.residual = residual;
    cp.cerami = cerami;
    if (residual <= config.tol_residual && cerami <= config.tol_cerami) {
      cp.converged = true;
      break;
    }
    if (iter >= config.max_iters) {
      cp.note = "max_iters reached";
      break;
    }
    if (prev_u.size() > 0) step = bb_step(I, u - prev_u, g - prev_g, step);
    prev_u = u;
    prev_g = g;
    StepResult sr = armijo(I, u, level, d, g, step, config.armijo, project);
    if (!sr.accepted) {
      cp.note = "line search stalled";
      break;
    }
    u = std::move(sr.v);
    level = sr.level;
    step = sr.step;
  }

  cp.level = I.energy(u);
  cp.u = std::move(u);
  if (!(cp.level < 0.0)) {
    // Nothing below the trivial level: report the origin.
    cp.degenerate = true;
    cp.u = Vec::Zero(I.dimension());
    cp.level = I.energy(cp.u);
    const Vec d = I.derivative(cp.u);
    cp.residual = std::sqrt(std::max(0.0, d.dot(I.riesz(d))));
    cp.cerami = cp.residual;
    cp.on_boundary = false;
    cp.converged = cp.residual <= config.tol_residual && cp.cerami <= config.tol_cerami;
    cp.note = "degenerate: level >= 0";
  }
  return cp;
}

MountainPassResult mountain_pass(const VariationalProblem& I, const Vec& e, const SolverConfig& config,
                                 std::optional<double> eta) {
  config.validate();
  if (e.size() != I.dimension()) throw DimensionError("endpoint has the wrong dimension");
  const double end_level = I.energy(e);
  if (!(end_level < 0.0)) throw ConfigError("mountain-pass endpoint must have negative energy");

  MountainPassResult res;
  MPPath& path = res.path;
  const int n = config.path_points;
  path.points.resize(n);
  for (int k = 0; k < n; ++k) path.points[k] = (static_cast<double>(k) / (n - 1)) * e;
  path.points.front().setZero();
  path.points.back() = e;
  path.level_profile = energies(I, path.points);

  CriticalPoint& cp = res.point;
  cp.kind = PointKind::mountain_pass;
  double step = config.deform_step;
  Vec prev_u;
  Vec prev_g;
  double prev_max = std::numeric_limits<double>::infinity();

  for (int iter = 0;; ++iter) {
    path.max_index = argmax_interior(path.level_profile);
    refine_max(I, path, prev_max);
    const int m = path.max_index;
    const Vec& u = path.points[m];
    const double level = path.level_profile[m];

    if (eta && level < 0.5 * *eta)
      throw PathCollapseError("path maximum " + std::to_string(level) + " fell below eta/2 = " +
                              std::to_string(0.5 * *eta));
    if (level > prev_max + 1e-12 * (1.0 + std::abs(prev_max))) ++res.monotonicity_violations;
    prev_max = level;

    const Vec d = I.derivative(u);
    const Vec g = I.riesz(d);
    const double dual = std::sqrt(std::max(0.0, d.dot(g)));
    const double cerami = (1.0 + I.norm(u)) * dual;
    cp.trace.push_back({iter, level, dual, cerami});
    cp.iters = iter;
    cp.residual = dual;
    cp.cerami = cerami;
    if (dual <= config.tol_residual && cerami <= config.tol_cerami) {
      cp.converged = true;
      break;
    }
    if (iter >= config.max_iters) {
      cp.note = "max_iters reached";
      break;
    }

    if (prev_u.size() > 0) step = bb_step(I, u - prev_u, g - prev_g, step);
    prev_u = u;
    prev_g = g;
    // A long step carries the maximiser across the ridge and the path loses
    // it; moves are capped at the mean path spacing.
    double spacing = 0.0;
    for (int k = 0; k + 1 < n; ++k) spacing += I.norm(path.points[k + 1] - path.points[k]);
    spacing /= (n - 1);
    // Transverse part of the gradient: sliding along the path is left to
    // refinement, which keeps the moved point on the ridge.
    const Vec tangent = chord_tangent(I, path.points, m);
    const Vec g_perp = g - I.inner(g, tangent) * tangent;
    const double gnorm = I.norm(g_perp);
    if (gnorm > 0.0) step = std::min(step, spacing / gnorm);
    StepResult sr = armijo(I, u, level, d, g_perp, step, config.armijo, [](Vec v) { return v; });
    if (!sr.accepted) {
      cp.note = "line search stalled";
      break;
    }
    path.points[m] = std::move(sr.v);
    path.level_profile[m] = sr.level;
    step = sr.step;

    std::vector<double> dist(n - 1);
    for (int k = 0; k + 1 < n; ++k) dist[k] = I.norm(path.points[k + 1] - path.points[k]);
    if (!spacing_ok(dist)) {
      // Re-spacing moves points onto chords of the old path; it is kept only
      // when the path maximum does not rise above the current level.
      std::vector<Vec> trial = path.points;
      respace(I, trial, 0, m);
      respace(I, trial, m, n - 1);
      std::vector<double> trial_levels = energies(I, trial);
      const double trial_max = trial_levels[argmax_interior(trial_levels)];
      if (trial_max <= level) {
        path.points = std::move(trial);
        path.level_profile = std::move(trial_levels);
        ++res.reparametrisations;
      } else {
        ++res.rejected_reparametrisations;
      }
    }
  }

  const int m = path.max_index;
  cp.u = path.points[m];
  cp.level = I.energy(cp.u);
  return res;
}

DistinctReport verify_distinct(const VariationalProblem& I, const CriticalPoint& cp1,
                               const CriticalPoint& cp2, const SolverConfig& config) {
  DistinctReport r;
  r.level1 = cp1.level;
  r.level2 = cp2.level;
  r.distance = I.norm(cp1.u - cp2.u);
  if (!(cp1.level < 0.0))
    r.reason = "step-1 level not negative";
  else if (!(cp2.level > 0.0))
    r.reason = "step-2 level not positive";
  else if (!(r.distance >= config.distinct_delta))
    r.reason = "solutions closer than distinct_delta";
  else if (!cp1.converged || !cp2.converged)
    r.reason = "solver did not converge";
  else
    r.pass = true;
  return r;
}

}  // namespace kirchhoff
