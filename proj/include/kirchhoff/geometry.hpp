#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/functional.hpp"

namespace kirchhoff {

/// Fitted growth constants: |F(x,u)| <= (c1/4)|u|^4 + (c2/q)|u|^q.
struct GrowthConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double q = 5.0;
};

struct SphereEstimate {
  double rho = 0.0;
  double eta = 0.0;          ///< min(sampled_min, refined_min)
  double sampled_min = 0.0;  ///< min over the random directions
  double refined_min = 0.0;  ///< after projected descent on the sphere
  int samples = 0;
  std::uint64_t seed = 0;
  std::optional<double> analytic_bound;
  Vec argmin;  ///< sphere point attaining eta
};

struct SphereOptions {
  int refine_starts = 4;   ///< best samples that get a descent pass
  int refine_iters = 200;
};

/// m unit-H-norm directions: A^{-1} W xi for seeded standard normal node
/// samples xi, normalised. Smoothing by A^{-1} keeps the samples in the part
/// of H where the energy actually varies; raw node noise is almost all
/// gradient energy.
std::vector<Vec> sphere_directions(const KirchhoffFunctional& I, int m, std::uint64_t seed);

/// Discrete analogue of 1/2 rho^2 - C1 rho^4 - C2 rho^q: uses
/// max_i |u_i| <= C_inf |u|_H with C_inf^2 = max_i (A^{-1})_ii and
/// int u^2 <= |u|_H^2.
double analytic_sphere_bound(const KirchhoffFunctional& I, const GrowthConstants& k, double rho);

/// Throws ConfigError for rho <= 0 or m < 32.
SphereEstimate estimate_sphere_min(const KirchhoffFunctional& I, double rho, int m,
                                   std::uint64_t seed, const SphereOptions& opts = {},
                                   std::optional<GrowthConstants> constants = std::nullopt);

/// max(0, 1 - r)^2 normalised to unit H-norm.
Field default_direction(const KirchhoffFunctional& I);

struct NegativeScan {
  Field e;
  double t = 0.0;
  double level = 0.0;
  double norm = 0.0;
  std::vector<double> ts;
  std::vector<double> levels;
  std::vector<double> quartic_ratio;  ///< I(t u) / t^4 per scan point
  bool trend_decreasing = false;      ///< ratio falls over the last three points
};

/// Scan t = 1, factor, factor^2, ... <= t_max for the first t u_dir with
/// I < 0 and |t u_dir|_H > rho. Two further points past e are evaluated for
/// the I(tu)/t^4 trend. Throws NotFoundError when the scan ends without one.
NegativeScan find_negative_energy_point(const KirchhoffFunctional& I, const Field& u_dir, double rho,
                                        double t_max, double factor = 2.0);

/// Largest t in {1, 1/2, 1/4, ...}, t >= t_min, with I(t u_dir) < 0.
std::optional<double> small_t_scan(const KirchhoffFunctional& I, const Field& u_dir, double t_min);

struct GeometryOptions {
  std::optional<double> rho;  ///< fixed radius; chosen automatically when empty
  int sphere_samples = 256;
  SphereOptions sphere;
  double t_max = 1e6;
  double factor = 2.0;
  double t_min = 1.0 / 1048576.0;
  std::uint64_t seed = 0;
  double rho_min = 1e-2;
  double rho_max = 1e3;
  int rho_grid = 41;  ///< log-spaced candidates for automatic selection
};

struct GeometryReport {
  bool holds = false;
  std::string rho_source;  ///< "config", "analytic" or "sampled"
  SphereEstimate sphere;
  std::optional<NegativeScan> scan;
  std::optional<double> t_star;
  std::vector<std::string> warnings;
  std::string failure;
};

/// rho selection, sphere certificate, negative-energy point and small-t scan.
GeometryReport certify_geometry(const KirchhoffFunctional& I, const GeometryOptions& opts,
                                std::optional<GrowthConstants> constants = std::nullopt);

}  // namespace kirchhoff
