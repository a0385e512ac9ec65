#include "kirchhoff/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr int kQuadStencil = 4;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// Three-point Gauss-Legendre on [-1, 1]; exact for quintics, which covers a
// cubic interpolant times r^2.
constexpr std::array<double, 3> kGaussX = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

DiffScheme parse_diff_scheme(std::string_view name) {
  if (name == "fd4") return DiffScheme::fd4;
  if (name == "fd2") return DiffScheme::fd2;
  throw ConfigError("unknown differentiation scheme '" + std::string(name) + "'");
}

std::string_view to_string(DiffScheme scheme) {
  return scheme == DiffScheme::fd4 ? "fd4" : "fd2";
}

Eigen::MatrixXd fornberg_weights(double z, std::span<const double> x, int max_order) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, max_order + 1);
  double c1 = 1.0;
  double c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

Vec radial_quadrature_weights(std::span<const double> points, double lo, double hi) {
  const int n = static_cast<int>(points.size());
  if (n < kQuadStencil) throw ConfigError("quadrature needs at least 4 points");
  Vec w = Vec::Zero(n);

  std::vector<double> breaks;
  breaks.reserve(n + 2);
  breaks.push_back(lo);
  for (double p : points)
    if (p > breaks.back()) breaks.push_back(p);
  if (hi > breaks.back()) breaks.push_back(hi);

  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double a = breaks[j];
    const double b = breaks[j + 1];
    // Nearest four points: centred on the interval where possible.
    const auto right = std::lower_bound(points.begin(), points.end(), b) - points.begin();
    int start = static_cast<int>(right) - 2;
    start = std::clamp(start, 0, n - kQuadStencil);
    const std::span<const double> stencil = points.subspan(start, kQuadStencil);

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      const double r = mid + half * kGaussX[q];
      const Eigen::MatrixXd lagrange = fornberg_weights(r, stencil, 0);
      const double jac = kGaussW[q] * half * 4.0 * std::numbers::pi * r * r;
      for (int s = 0; s < kQuadStencil; ++s) w[start + s] += jac * lagrange(s, 0);
    }
  }
  return w;
}

RadialGrid build_grid(double radius, int n, DiffScheme scheme) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ConfigError("grid radius must be positive, got " + std::to_string(radius));
  if (n < 8) throw ConfigError("grid needs at least 8 nodes, got " + std::to_string(n));

  RadialGrid g;
  g.radius_ = radius;
  g.n_ = n;
  g.h_ = radius / n;
  g.scheme_ = scheme;
  g.id_ = mix(mix(mix(0, std::bit_cast<std::uint64_t>(radius)), static_cast<std::uint64_t>(n)),
              static_cast<std::uint64_t>(scheme));

  g.nodes_.resize(n);
  for (int i = 0; i < n; ++i) g.nodes_[i] = (i + 0.5) * g.h_;
  g.faces_.resize(n);
  for (int k = 0; k < n; ++k) g.faces_[k] = (k + 1) * g.h_;
  g.faces_.back() = radius;

  g.weights_ = radial_quadrature_weights(g.nodes_, 0.0, radius);
  g.face_weights_ = radial_quadrature_weights(g.faces_, 0.0, radius);

  // Extended point set: indices 0..n-1 are nodes, index n is r = R.
  std::vector<double> ext(g.nodes_);
  ext.push_back(radius);

  std::vector<Eigen::Triplet<double>> trips;
  g.diff_boundary_ = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    // Face k sits between nodes k and k+1 (face n-1 is the outer boundary).
    int lo = 0;
    int hi = 0;
    if (scheme == DiffScheme::fd4) {
      lo = k - 1;
      hi = k + 2;
      // Centred stencils only on uniform spacing; otherwise five one-sided points.
      if (lo < 0) {
        lo = 0;
        hi = 4;
      } else if (hi > n - 1) {
        hi = n;
        lo = n - 4;
      }
    } else {
      lo = k;
      hi = k + 1;
      if (hi > n - 1) {
        hi = n;
        lo = n - 2;
      }
    }
    const std::span<const double> stencil(ext.data() + lo, hi - lo + 1);
    const Eigen::MatrixXd c = fornberg_weights(g.faces_[k], stencil, 1);
    for (int s = 0; s <= hi - lo; ++s) {
      const int idx = lo + s;
      if (idx == n)
        g.diff_boundary_[k] = c(s, 1);
      else
        trips.emplace_back(k, idx, c(s, 1));
    }
  }
  g.diff_.resize(n, n);
  g.diff_.setFromTriplets(trips.begin(), trips.end());
  g.diff_.makeCompressed();

  SparseMat weighted = g.face_weights_.asDiagonal() * g.diff_;
  g.stiffness_ = SparseMat(g.diff_.transpose() * weighted);
  g.stiffness_.makeCompressed();

  for (int i = 0; i < n; ++i)
    if (!(g.weights_[i] > 0.0) || !(g.face_weights_[i] > 0.0))
      throw NumericalError("non-positive quadrature weight at index " + std::to_string(i));
  return g;
}

Vec RadialGrid::derivative(const Vec& samples, double value_at_radius) const {
  if (samples.size() != n_) throw DimensionError("derivative: sample count does not match grid");
  return diff_ * samples + diff_boundary_ * value_at_radius;
}

Field make_field(const RadialGrid& grid, Vec values) {
  if (values.size() != grid.size()) throw DimensionError("field length does not match grid");
  return Field{std::move(values), grid.id()};
}

Field zero_field(const RadialGrid& grid) { return Field{Vec::Zero(grid.size()), grid.id()}; }

double integrate(const RadialGrid& grid, const Vec& samples) {
  if (samples.size() != grid.size()) throw DimensionError("integrate: sample count does not match grid");
  return grid.weights().dot(samples);
}

double gradient_energy(const RadialGrid& grid, const Field& u) {
  if (u.grid_id != grid.id() || u.values.size() != grid.size())
    throw DimensionError("gradient_energy: field lives on a different grid");
  const Vec du = grid.diff() * u.values;
  return grid.face_weights().dot(du.cwiseAbs2());
}

double h_norm_sq(const RadialGrid& grid, const Field& u, const Vec& shifted_potential) {
  if (shifted_potential.size() != grid.size())
    throw DimensionError("h_norm_sq: potential sample count does not match grid");
  for (int i = 0; i < grid.size(); ++i)
    if (shifted_potential[i] < 1.0)
      throw ShiftViolation("shifted potential " + std::to_string(shifted_potential[i]) +
                           " < 1 at r = " + std::to_string(grid.nodes()[i]) +
                           "; the shift constant is too small");
  return gradient_energy(grid, u) +
         integrate(grid, shifted_potential.cwiseProduct(u.values.cwiseAbs2()));
}

}  // namespace kirchhoff
