#pragma once

#include <span>

#include <Eigen/SparseCholesky>

#include "kirchhoff/grid.hpp"
#include "kirchhoff/model.hpp"
#include "kirchhoff/variational.hpp"

namespace kirchhoff {

struct EnergyBreakdown {
  double dirichlet = 0.0;  ///< 1/2 int |grad u|^2
  double potential = 0.0;  ///< 1/2 int V u^2
  double kirchhoff = 0.0;  ///< b/4 (int |grad u|^2)^2
  double nonlinear = 0.0;  ///< int F(x, u)
  double total = 0.0;
};

struct GradientReport {
  Field riesz;
  double dual_norm = 0.0;
  double cerami = 0.0;
  double h_norm = 0.0;
};

/// Discrete energy of a shifted problem on a grid. The H-matrix
/// K + diag(w V) is assembled and factored once at construction; all
/// evaluation methods are const and safe to call concurrently.
class KirchhoffFunctional final : public VariationalProblem {
 public:
  /// Throws ConfigError for an unshifted spec or a non-radial nonlinearity,
  /// ShiftViolation when the shifted potential is below 1 at a node.
  KirchhoffFunctional(ProblemSpec shifted, const RadialGrid& grid);

  const RadialGrid& grid() const { return grid_; }
  const ProblemSpec& spec() const { return spec_; }
  const Vec& potential_samples() const { return vtilde_; }
  const SparseMat& h_matrix() const { return hmat_; }

  EnergyBreakdown breakdown(const Field& u) const;
  GradientReport gradient(const Field& u) const;
  /// <I'(u), v> assembled term by term, without the coefficient gradient.
  double directional(const Field& u, const Field& v) const;

  int dimension() const override { return grid_.size(); }
  double energy(const Vec& u) const override;
  Vec derivative(const Vec& u) const override;
  Vec riesz(const Vec& d) const override;
  double inner(const Vec& a, const Vec& b) const override;

  Field field(Vec values) const { return make_field(grid_, std::move(values)); }

 private:
  void check(const Field& u) const;

  ProblemSpec spec_;
  RadialGrid grid_;
  Vec vtilde_;
  SparseMat hmat_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

/// Energy and coefficient gradient of a spec as given (shifted or not), with
/// no lower bound on the potential. Used to compare a problem with its shift.
EnergyBreakdown raw_energy(const ProblemSpec& spec, const RadialGrid& grid, const Field& u);
Vec raw_derivative(const ProblemSpec& spec, const RadialGrid& grid, const Field& u);

/// min over the samples of (c1/4)|u|^4 + (c2/q)|u|^q - |F(x, u)|.
double growth_bound_check(const Nonlinearity& nonlinearity, double c1, double c2, double q,
                          std::span<const double> u_samples, std::span<const Point> x_samples);

}  // namespace kirchhoff
