#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace kirchhoff {

/// A C^1 functional on R^d equipped with an inner product. The solvers only
/// see this interface, so the one-dimensional surrogates and the discretised
/// Kirchhoff energy share the same code path.
class VariationalProblem {
 public:
  virtual ~VariationalProblem() = default;

  virtual int dimension() const = 0;
  virtual double energy(const Eigen::VectorXd& u) const = 0;
  /// Coefficient-space derivative: component i is <I'(u), e_i>.
  virtual Eigen::VectorXd derivative(const Eigen::VectorXd& u) const = 0;
  /// Representative g of a derivative d, i.e. (g, v) = d . v for all v.
  virtual Eigen::VectorXd riesz(const Eigen::VectorXd& d) const = 0;
  virtual double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const = 0;

  double norm(const Eigen::VectorXd& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }
};

/// Euclidean inner product, identity Riesz map. Enough for scalar toys.
template <typename Energy, typename Derivative>
class EuclideanProblem final : public VariationalProblem {
 public:
  EuclideanProblem(int dim, Energy e, Derivative d) : dim_(dim), e_(std::move(e)), d_(std::move(d)) {}

  int dimension() const override { return dim_; }
  double energy(const Eigen::VectorXd& u) const override { return e_(u); }
  Eigen::VectorXd derivative(const Eigen::VectorXd& u) const override { return d_(u); }
  Eigen::VectorXd riesz(const Eigen::VectorXd& d) const override { return d; }
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const override { return a.dot(b); }

 private:
  int dim_;
  Energy e_;
  Derivative d_;
};

}  // namespace kirchhoff
