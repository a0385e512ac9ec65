#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace kirchhoff {

using Vec = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// First-derivative stencil family. Derivatives live on the cell faces between
/// nodes; `fd4` is fourth order, `fd2` second order.
enum class DiffScheme { fd2, fd4 };

DiffScheme parse_diff_scheme(std::string_view name);
std::string_view to_string(DiffScheme scheme);

/// Uniform radial discretisation of the ball B_R in R^3.
///
/// Cell-centred nodes r_i = (i - 1/2) h, i = 1..n with h = R/n; neither r = 0
/// nor r = R is a node. Fields vanish at r = R. Node weights fold in the
/// 4*pi*r^2 Jacobian and integrate cubic polynomials in r exactly over [0, R].
/// Derivatives are evaluated at the n faces k*h, k = 1..n (the last one is
/// r = R), which carry their own weights of the same kind.
class RadialGrid {
 public:
  double radius() const { return radius_; }
  int size() const { return n_; }
  double spacing() const { return h_; }
  DiffScheme scheme() const { return scheme_; }
  std::uint64_t id() const { return id_; }

  std::span<const double> nodes() const { return nodes_; }
  const Vec& weights() const { return weights_; }
  std::span<const double> face_points() const { return faces_; }
  const Vec& face_weights() const { return face_weights_; }

  /// n x n map from node values to derivatives at the faces, assuming u(R) = 0.
  const SparseMat& diff() const { return diff_; }
  /// Coefficient of u(R) in each face derivative.
  const Vec& diff_boundary() const { return diff_boundary_; }

  /// Derivative at the faces for arbitrary node samples with the given value
  /// at r = R.
  Vec derivative(const Vec& samples, double value_at_radius = 0.0) const;

  /// Gradient stiffness D^T W_s D, so that u^T K u = integral of |grad u|^2.
  const SparseMat& stiffness() const { return stiffness_; }

 private:
  friend RadialGrid build_grid(double radius, int n, DiffScheme scheme);
  RadialGrid() = default;

  double radius_ = 0.0;
  int n_ = 0;
  double h_ = 0.0;
  DiffScheme scheme_ = DiffScheme::fd4;
  std::uint64_t id_ = 0;
  std::vector<double> nodes_;
  Vec weights_;
  std::vector<double> faces_;
  Vec face_weights_;
  SparseMat diff_;
  Vec diff_boundary_;
  SparseMat stiffness_;
};

/// Node values of a radial function on a specific grid; u(R) = 0 implicitly.
struct Field {
  Vec values;
  std::uint64_t grid_id = 0;
};

/// Throws ConfigError for n < 8 or R <= 0.
RadialGrid build_grid(double radius, int n, DiffScheme scheme = DiffScheme::fd4);

Field make_field(const RadialGrid& grid, Vec values);
Field zero_field(const RadialGrid& grid);

template <typename Fn>
Field sample_field(const RadialGrid& grid, Fn&& fn) {
  Vec v(grid.size());
  const auto r = grid.nodes();
  for (int i = 0; i < grid.size(); ++i) v[i] = fn(r[i]);
  return make_field(grid, std::move(v));
}

double integrate(const RadialGrid& grid, const Vec& samples);
double gradient_energy(const RadialGrid& grid, const Field& u);
/// Throws ShiftViolation when any potential sample is below 1.
double h_norm_sq(const RadialGrid& grid, const Field& u, const Vec& shifted_potential);

/// Weights of the interpolatory rule for the integral over [lo, hi] of
/// g(r) * 4 pi r^2, using piecewise cubic interpolation of g through the
/// (sorted) points. Exposed for tests.
Vec radial_quadrature_weights(std::span<const double> points, double lo, double hi);

/// Fornberg's finite-difference weights: weights(j, k) is the coefficient of
/// f(x_j) in the k-th derivative at z, for k = 0..max_order.
Eigen::MatrixXd fornberg_weights(double z, std::span<const double> x, int max_order);

}  // namespace kirchhoff
