#include "kirchhoff/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

EnergyBreakdown assemble_energy(const RadialGrid& grid, const Vec& v, const Nonlinearity& nl,
                                double b, const Vec& u) {
  const auto r = grid.nodes();
  const Vec du = grid.diff() * u;
  const double grad = grid.face_weights().dot(du.cwiseAbs2());
  const Vec& w = grid.weights();
  double pot = 0.0;
  double nonlin = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    pot += w[i] * v[i] * u[i] * u[i];
    nonlin += w[i] * nl.F(r[i], u[i]);
  }
  EnergyBreakdown e;
  e.dirichlet = 0.5 * grad;
  e.potential = 0.5 * pot;
  e.kirchhoff = 0.25 * b * grad * grad;
  e.nonlinear = nonlin;
  e.total = e.dirichlet + e.potential + e.kirchhoff - e.nonlinear;
  return e;
}

// (1 + b G) K u + W (V u - f(u)).
Vec assemble_derivative(const RadialGrid& grid, const Vec& v, const Nonlinearity& nl, double b,
                        const Vec& u) {
  const auto r = grid.nodes();
  const Vec ku = grid.stiffness() * u;
  const double grad = u.dot(ku);
  Vec d = (1.0 + b * grad) * ku;
  const Vec& w = grid.weights();
  for (int i = 0; i < grid.size(); ++i) d[i] += w[i] * (v[i] * u[i] - nl.f(r[i], u[i]));
  return d;
}

}  // namespace

KirchhoffFunctional::KirchhoffFunctional(ProblemSpec shifted, const RadialGrid& grid)
    : spec_(std::move(shifted)), grid_(grid) {
  if (!spec_.shifted) throw ConfigError("energy needs a shifted problem; call shift_problem first");
  if (!spec_.nonlinearity.radial())
    throw ConfigError("nonlinearity '" + spec_.nonlinearity.describe() +
                      "' is not radial and cannot be discretised on a radial grid");
  vtilde_ = spec_.potential.sample(grid_);
  const auto r = grid_.nodes();
  for (int i = 0; i < grid_.size(); ++i)
    if (vtilde_[i] < 1.0)
      throw ShiftViolation("shifted potential " + std::to_string(vtilde_[i]) + " < 1 at r = " +
                           std::to_string(r[i]) + "; the shift constant is too small");

  Vec diag = grid_.weights().cwiseProduct(vtilde_);
  hmat_ = grid_.stiffness();
  for (int i = 0; i < grid_.size(); ++i) hmat_.coeffRef(i, i) += diag[i];
  hmat_.makeCompressed();
  chol_.compute(Eigen::SparseMatrix<double>(hmat_));
  if (chol_.info() != Eigen::Success)
    throw NumericalError("factorisation of the H inner-product matrix failed");
}

void KirchhoffFunctional::check(const Field& u) const {
  if (u.grid_id != grid_.id() || u.values.size() != grid_.size())
    throw DimensionError("field does not live on the functional's grid");
}

EnergyBreakdown KirchhoffFunctional::breakdown(const Field& u) const {
  check(u);
  return assemble_energy(grid_, vtilde_, spec_.nonlinearity, spec_.b, u.values);
}

double KirchhoffFunctional::energy(const Vec& u) const {
  if (u.size() != grid_.size()) throw DimensionError("energy: wrong coefficient count");
  return assemble_energy(grid_, vtilde_, spec_.nonlinearity, spec_.b, u).total;
}

Vec KirchhoffFunctional::derivative(const Vec& u) const {
  if (u.size() != grid_.size()) throw DimensionError("derivative: wrong coefficient count");
  return assemble_derivative(grid_, vtilde_, spec_.nonlinearity, spec_.b, u);
}

Vec KirchhoffFunctional::riesz(const Vec& d) const {
  Vec g = chol_.solve(d);
  if (chol_.info() != Eigen::Success || !g.allFinite())
    throw NumericalError("Riesz solve failed");
  return g;
}

double KirchhoffFunctional::inner(const Vec& a, const Vec& b) const { return a.dot(hmat_ * b); }

GradientReport KirchhoffFunctional::gradient(const Field& u) const {
  check(u);
  const Vec d = derivative(u.values);
  GradientReport rep;
  rep.riesz = field(riesz(d));
  // |I'(u)|_{H*}^2 = d^T A^{-1} d = d . g
  rep.dual_norm = std::sqrt(std::max(0.0, d.dot(rep.riesz.values)));
  rep.h_norm = norm(u.values);
  rep.cerami = (1.0 + rep.h_norm) * rep.dual_norm;
  return rep;
}

double KirchhoffFunctional::directional(const Field& u, const Field& v) const {
  check(u);
  check(v);
  const Vec du = grid_.diff() * u.values;
  const Vec dv = grid_.diff() * v.values;
  const Vec& ws = grid_.face_weights();
  const double grad = ws.dot(du.cwiseAbs2());
  const double cross = ws.dot(du.cwiseProduct(dv));
  const auto r = grid_.nodes();
  const Vec& w = grid_.weights();
  double pot = 0.0;
  double nonlin = 0.0;
  for (int i = 0; i < grid_.size(); ++i) {
    pot += w[i] * vtilde_[i] * u.values[i] * v.values[i];
    nonlin += w[i] * spec_.nonlinearity.f(r[i], u.values[i]) * v.values[i];
  }
  return (1.0 + spec_.b * grad) * cross + pot - nonlin;
}

EnergyBreakdown raw_energy(const ProblemSpec& spec, const RadialGrid& grid, const Field& u) {
  if (u.grid_id != grid.id()) throw DimensionError("raw_energy: field lives on a different grid");
  return assemble_energy(grid, spec.potential.sample(grid), spec.nonlinearity, spec.b, u.values);
}

Vec raw_derivative(const ProblemSpec& spec, const RadialGrid& grid, const Field& u) {
  if (u.grid_id != grid.id()) throw DimensionError("raw_derivative: field lives on a different grid");
  return assemble_derivative(grid, spec.potential.sample(grid), spec.nonlinearity, spec.b, u.values);
}

double growth_bound_check(const Nonlinearity& nonlinearity, double c1, double c2, double q,
                          std::span<const double> u_samples, std::span<const Point> x_samples) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Point& x : x_samples)
    for (double u : u_samples) {
      const double a = std::abs(u);
      const double bound = 0.25 * c1 * a * a * a * a + c2 / q * std::pow(a, q);
      margin = std::min(margin, bound - std::abs(nonlinearity.F(x, u)));
    }
  return margin;
}

}  // namespace kirchhoff
