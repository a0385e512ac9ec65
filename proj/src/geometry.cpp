#include "kirchhoff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/kernels.hpp"

namespace kirchhoff {

namespace {

constexpr double kSigma = 1e-4;

// Projected descent on the sphere |u|_H = rho with radial retraction.
double sphere_descent(const KirchhoffFunctional& I, Vec& u, double rho, int iters) {
  double level = I.energy(u);
  double step = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Vec g = I.riesz(I.derivative(u));
    const Vec tangent = g - (I.inner(g, u) / (rho * rho)) * u;
    const double slope = I.inner(tangent, tangent);
    if (!(slope > 0.0)) break;
    bool moved = false;
    while (step > 1e-16) {
      Vec v = u - step * tangent;
      v *= rho / I.norm(v);
      const double lv = I.energy(v);
      if (lv <= level - kSigma * step * slope) {
        u = std::move(v);
        level = lv;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return level;
}

double sup_constant_sq(const KirchhoffFunctional& I) {
  const int n = I.dimension();
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    c = std::max(c, I.riesz(e)[i]);
  }
  return c;
}

double bound_from(double cinf_sq, const GrowthConstants& k, double rho) {
  const double cinf = std::sqrt(cinf_sq);
  return 0.5 * rho * rho - 0.25 * k.c1 * cinf_sq * std::pow(rho, 4) -
         k.c2 / k.q * std::pow(cinf, k.q - 2.0) * std::pow(rho, k.q);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace

std::vector<Vec> sphere_directions(const KirchhoffFunctional& I, int m, std::uint64_t seed) {
  const int n = I.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> xi(m, Vec(n));
  for (Vec& x : xi)
    for (int i = 0; i < n; ++i) x[i] = normal(rng);
  std::vector<Vec> dirs(m);
  map_indexed(m, [&](std::size_t k) {
    Vec d = I.riesz(I.grid().weights().cwiseProduct(xi[k]));
    dirs[k] = d / I.norm(d);
    return 0.0;
  });
  return dirs;
}

double analytic_sphere_bound(const KirchhoffFunctional& I, const GrowthConstants& k, double rho) {
  return bound_from(sup_constant_sq(I), k, rho);
}

SphereEstimate estimate_sphere_min(const KirchhoffFunctional& I, double rho, int m,
                                   std::uint64_t seed, const SphereOptions& opts,
                                   std::optional<GrowthConstants> constants) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("sphere radius must be positive");
  if (m < 32) throw ConfigError("sphere sampling needs at least 32 directions");

  std::vector<Vec> points = sphere_directions(I, m, seed);
  for (Vec& p : points) p *= rho;
  const std::vector<double> levels = energies(I, points);

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return levels[a] < levels[b]; });

  SphereEstimate est;
  est.rho = rho;
  est.samples = m;
  est.seed = seed;
  est.sampled_min = levels[order[0]];
  est.eta = est.sampled_min;
  est.argmin = points[order[0]];
  est.refined_min = est.sampled_min;

  const int starts = std::min(opts.refine_starts, m);
  if (starts > 0 && opts.refine_iters > 0) {
    std::vector<Vec> refined(starts);
    const std::vector<double> rl = map_indexed(starts, [&](std::size_t k) {
      refined[k] = points[order[k]];
      return sphere_descent(I, refined[k], rho, opts.refine_iters);
    });
    for (int k = 0; k < starts; ++k)
      if (rl[k] < est.refined_min) {
        est.refined_min = rl[k];
        if (rl[k] < est.eta) {
          est.eta = rl[k];
          est.argmin = refined[k];
        }
      }
  }
  if (constants) est.analytic_bound = analytic_sphere_bound(I, *constants, rho);
  return est;
}

Field default_direction(const KirchhoffFunctional& I) {
  Field u = sample_field(I.grid(), [](double r) {
    const double s = std::max(0.0, 1.0 - r);
    return s * s;
  });
  const double nrm = I.norm(u.values);
  if (!(nrm > 0.0)) throw NumericalError("default direction vanishes on this grid");
  u.values /= nrm;
  return u;
}

NegativeScan find_negative_energy_point(const KirchhoffFunctional& I, const Field& u_dir, double rho,
                                        double t_max, double factor) {
  if (!(factor > 1.0)) throw ConfigError("scan factor must exceed 1");
  const double unorm = I.norm(u_dir.values);
  if (!(unorm > 0.0)) throw ConfigError("scan direction must be nonzero");

  NegativeScan scan;
  auto eval = [&](double t) {
    const double level = I.energy(t * u_dir.values);
    scan.ts.push_back(t);
    scan.levels.push_back(level);
    scan.quartic_ratio.push_back(level / std::pow(t, 4));
    return level;
  };

  bool found = false;
  for (double t = 1.0; t <= t_max; t *= factor) {
    const double level = eval(t);
    if (level < 0.0 && t * unorm > rho) {
      scan.t = t;
      scan.level = level;
      found = true;
      break;
    }
  }
  if (!found)
    throw NotFoundError("no t <= " + fmt(t_max) +
                        " gives negative energy beyond the sphere along this direction");

  eval(scan.t * factor);
  eval(scan.t * factor * factor);
  const auto& q = scan.quartic_ratio;
  const std::size_t k = q.size();
  scan.trend_decreasing = q[k - 1] < q[k - 2] && q[k - 2] < q[k - 3];

  scan.e = make_field(I.grid(), scan.t * u_dir.values);
  // Re-checked from scratch rather than trusted from the scan.
  scan.level = I.breakdown(scan.e).total;
  scan.norm = I.norm(scan.e.values);
  if (!(scan.level < 0.0) || !(scan.norm > rho))
    throw NumericalError("negative-energy point failed its recheck");
  return scan;
}

std::optional<double> small_t_scan(const KirchhoffFunctional& I, const Field& u_dir, double t_min) {
  if (!(I.norm(u_dir.values) > 0.0)) throw ConfigError("scan direction must be nonzero");
  for (double t = 1.0; t >= t_min; t *= 0.5)
    if (I.energy(t * u_dir.values) < 0.0) return t;
  return std::nullopt;
}

GeometryReport certify_geometry(const KirchhoffFunctional& I, const GeometryOptions& opts,
                                std::optional<GrowthConstants> constants) {
  GeometryReport rep;
  double rho = 0.0;
  if (opts.rho) {
    rho = *opts.rho;
    rep.rho_source = "config";
  } else {
    const std::vector<double> grid = log_grid(opts.rho_min, opts.rho_max, opts.rho_grid);
    if (constants) {
      const double cinf_sq = sup_constant_sq(I);
      double best = -std::numeric_limits<double>::infinity();
      for (double r : grid) {
        const double b = bound_from(cinf_sq, *constants, r);
        if (b > best) {
          best = b;
          rho = r;
        }
      }
      if (best > 0.0) rep.rho_source = "analytic";
    }
    if (rep.rho_source.empty()) {
      // Largest sampled minimum first; a candidate is kept only if descent
      // on its sphere stays positive too.
      rep.rho_source = "sampled";
      const std::vector<Vec> dirs = sphere_directions(I, opts.sphere_samples, opts.seed);
      std::vector<double> mins(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<Vec> pts(dirs);
        for (Vec& p : pts) p *= grid[j];
        const std::vector<double> lv = energies(I, pts);
        mins[j] = *std::min_element(lv.begin(), lv.end());
      }
      std::vector<std::size_t> order(grid.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return mins[a] > mins[b]; });
      rho = grid[order[0]];
      for (std::size_t j : order) {
        if (!(mins[j] > 0.0)) break;
        const SphereEstimate est =
            estimate_sphere_min(I, grid[j], opts.sphere_samples, opts.seed, opts.sphere, constants);
        if (est.eta > 0.0) {
          rho = grid[j];
          break;
        }
      }
    }
  }

  rep.sphere = estimate_sphere_min(I, rho, opts.sphere_samples, opts.seed, opts.sphere, constants);
  if (!(rep.sphere.eta > 0.0)) {
    rep.failure = "sphere minimum " + fmt(rep.sphere.eta) + " is not positive at rho = " + fmt(rho);
  }

  const Field dir = default_direction(I);
  try {
    rep.scan = find_negative_energy_point(I, dir, rho, opts.t_max, opts.factor);
    if (!rep.scan->trend_decreasing)
      rep.warnings.push_back("I(tu)/t^4 does not decrease past the negative-energy point");
  } catch (const NotFoundError& err) {
    if (rep.failure.empty()) rep.failure = err.what();
  }
  rep.t_star = small_t_scan(I, dir, opts.t_min);
  rep.holds = rep.sphere.eta > 0.0 && rep.scan.has_value();
  return rep;
}

}  // namespace kirchhoff
