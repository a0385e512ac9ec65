#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kirchhoff/grid.hpp"

namespace kirchhoff {

using Point = std::array<double, 3>;

double radius_of(const Point& x);

/// Piecewise-linear radial profile through (radius, value) knots, flat
/// outside the knot range.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(std::vector<double> radii, std::vector<double> values);

  double operator()(double r) const;
  double min() const;
  double max() const;
  bool empty() const { return radii_.empty(); }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

enum class PotentialKind { zigzag, constant, tabulated };

std::string_view to_string(PotentialKind kind);

/// Radial potential V(|x|), plus an additive offset that the shift adds.
class Potential {
 public:
  static Potential zigzag(double a0);
  static Potential constant(double value);
  static Potential tabulated(RadialTable table);

  PotentialKind kind() const { return kind_; }
  double a0() const { return param_; }
  double constant_value() const { return param_; }
  const RadialTable& table() const { return table_; }
  double offset() const { return offset_; }

  double operator()(double r) const;
  double at(const Point& x) const { return (*this)(radius_of(x)); }
  /// Exact infimum over r >= 0, offset included.
  double infimum() const;
  Potential with_offset(double extra) const;
  Vec sample(const RadialGrid& grid) const;

 private:
  PotentialKind kind_ = PotentialKind::constant;
  double param_ = 1.0;
  RadialTable table_;
  double offset_ = 0.0;
};

/// The zig-zag profile: minima a0 at the integers, peaks n + a0 at (2n-1)/2.
double eval_zigzag(double r, double a0);

double eval_example_f(double a, double u);
double eval_example_F(double a, double u);

double eval_ar_violator(double u, double x1);
double eval_ar_violator_primitive(double u, double x1);

/// C-infinity cutoff: 1 on [0, 1], 0 on [2, inf).
double smooth_cutoff(double s);
double smooth_cutoff_derivative(double s);

/// a(r) (4u^4 + 2u^2 sin u - 4u cos u). An empty table means a == constant.
struct KirchhoffExampleTerm {
  double amplitude = 1.0;
  RadialTable amplitude_table;

  double a(double r) const { return amplitude_table.empty() ? amplitude : amplitude_table(r); }
};

/// sin(x1) ln(1 + |u|) u^2. Not radial.
struct ArViolatorTerm {};

/// F = c3 |u|^tau phi(|u|) + u^4.
struct SublinearOriginTerm {
  double c3 = 1.0;
  double tau = 1.0;
};

/// f = coef |u|^(p-2) u, F = coef |u|^p / p.
struct PowerTerm {
  double coef = 1.0;
  double p = 4.0;
};

/// f piecewise linear in u through the knots (linear extrapolation), F its
/// exact primitive from 0.
class TabulatedTerm {
 public:
  TabulatedTerm(std::vector<double> u, std::vector<double> f);
  double f(double u) const;
  double F(double u) const;
  const std::vector<double>& knots() const { return u_; }
  const std::vector<double>& values() const { return f_; }

 private:
  double antiderivative(double u) const;
  std::vector<double> u_;
  std::vector<double> f_;
  std::vector<double> cumulative_;
  double origin_ = 0.0;
};

using Term = std::variant<KirchhoffExampleTerm, ArViolatorTerm, SublinearOriginTerm, PowerTerm,
                          TabulatedTerm>;

std::string term_name(const Term& term);

/// Sum of terms plus linear_shift * u (the shift adds V0 u).
class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<Term> terms, double linear_shift = 0.0)
      : terms_(std::move(terms)), linear_shift_(linear_shift) {}

  double f(const Point& x, double u) const;
  double F(const Point& x, double u) const;
  /// Radial evaluation at x = (r, 0, 0).
  double f(double r, double u) const { return f(Point{r, 0.0, 0.0}, u); }
  double F(double r, double u) const { return F(Point{r, 0.0, 0.0}, u); }

  bool radial() const;
  bool zero() const;
  const std::vector<Term>& terms() const { return terms_; }
  double linear_shift() const { return linear_shift_; }
  Nonlinearity with_linear_shift(double extra) const;
  std::string describe() const;

 private:
  std::vector<Term> terms_;
  double linear_shift_ = 0.0;
};

struct ProblemSpec {
  double b = 1.0;
  Potential potential = Potential::constant(1.0);
  Nonlinearity nonlinearity;
  std::optional<double> v0;  ///< requested shift; auto when empty
  bool shifted = false;
  double applied_shift = 0.0;
  double R = 8.0;
  int n = 256;
  DiffScheme scheme = DiffScheme::fd4;
};

/// Throws ConfigError on b < 0, bad amplitudes or bad term parameters.
void validate(const ProblemSpec& spec);

/// max(0, 1 - inf V).
double auto_shift(const Potential& potential);

/// Idempotent on an already shifted spec.
ProblemSpec shift_problem(const ProblemSpec& spec);

}  // namespace kirchhoff
