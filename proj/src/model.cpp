#include "kirchhoff/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sgn(double u) { return (u > 0.0) - (u < 0.0); }

// Linear interpolation on sorted knots; index of the segment holding x,
// clamped to the end segments.
std::size_t segment(const std::vector<double>& knots, double x) {
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots.begin(), 1));
  return std::min(i, knots.size() - 1) - 1;
}

// psi(t) = exp(-1/t) for t > 0.
double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Integral of ln(1+t) t^2 over [0, s] for s >= 0.
double ar_primitive_abs(double s) {
  if (s < 0.1) {
    double sum = 0.0;
    double pw = s * s * s;
    for (int k = 1; k <= 20; ++k) {
      pw *= s;
      sum += ((k % 2) ? 1.0 : -1.0) * pw / (k * (k + 3.0));
    }
    return sum;
  }
  const double l = std::log1p(s);
  return s * s * s / 3.0 * l - (s * s * s / 3.0 - s * s / 2.0 + s - l) / 3.0;
}

void check_sorted(const std::vector<double>& x, const char* what) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw ConfigError(std::string(what) + " knots must be strictly increasing");
}

}  // namespace

double radius_of(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

RadialTable::RadialTable(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  if (radii_.size() != values_.size())
    throw ConfigError("radial table: radii and values differ in length");
  if (radii_.empty()) throw ConfigError("radial table is empty");
  check_sorted(radii_, "radial table");
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("radial table holds a non-finite value");
}

double RadialTable::operator()(double r) const {
  if (radii_.size() == 1 || r <= radii_.front()) return values_.front();
  if (r >= radii_.back()) return values_.back();
  const std::size_t i = segment(radii_, r);
  const double s = (r - radii_[i]) / (radii_[i + 1] - radii_[i]);
  return (1.0 - s) * values_[i] + s * values_[i + 1];
}

double RadialTable::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RadialTable::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zigzag: return "zigzag";
    case PotentialKind::constant: return "constant";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "?";
}

Potential Potential::zigzag(double a0) {
  Potential p;
  p.kind_ = PotentialKind::zigzag;
  p.param_ = a0;
  return p;
}

Potential Potential::constant(double value) {
  Potential p;
  p.kind_ = PotentialKind::constant;
  p.param_ = value;
  return p;
}

Potential Potential::tabulated(RadialTable table) {
  Potential p;
  p.kind_ = PotentialKind::tabulated;
  p.table_ = std::move(table);
  p.param_ = 0.0;
  return p;
}

double Potential::operator()(double r) const {
  switch (kind_) {
    case PotentialKind::zigzag: return eval_zigzag(r, param_) + offset_;
    case PotentialKind::constant: return param_ + offset_;
    case PotentialKind::tabulated: return table_(r) + offset_;
  }
  return 0.0;
}

double Potential::infimum() const {
  switch (kind_) {
    case PotentialKind::zigzag:
    case PotentialKind::constant: return param_ + offset_;
    case PotentialKind::tabulated: return table_.min() + offset_;
  }
  return 0.0;
}

Potential Potential::with_offset(double extra) const {
  Potential p = *this;
  p.offset_ += extra;
  return p;
}

Vec Potential::sample(const RadialGrid& grid) const {
  Vec v(grid.size());
  const auto r = grid.nodes();
  for (int i = 0; i < grid.size(); ++i) v[i] = (*this)(r[i]);
  return v;
}

double eval_zigzag(double r, double a0) {
  const double n = std::ceil(std::max(r, 1.0));
  if (r <= (2.0 * n - 1.0) / 2.0) return 2.0 * n * r - 2.0 * n * (n - 1.0) + a0;
  return -2.0 * n * r + 2.0 * n * n + a0;
}

double eval_example_f(double a, double u) {
  return a * (4.0 * u * u * u * u + 2.0 * u * u * std::sin(u) - 4.0 * u * std::cos(u));
}

double eval_example_F(double a, double u) {
  return a * (0.8 * u * u * u * u * u - 2.0 * u * u * std::cos(u));
}

double eval_ar_violator(double u, double x1) {
  return std::sin(x1) * std::log1p(std::abs(u)) * u * u;
}

double eval_ar_violator_primitive(double u, double x1) {
  return std::sin(x1) * sgn(u) * ar_primitive_abs(std::abs(u));
}

double smooth_cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double pa = psi(2.0 - s);
  const double pb = psi(s - 1.0);
  return pa / (pa + pb);
}

double smooth_cutoff_derivative(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double a = 2.0 - s;
  const double b = s - 1.0;
  const double pa = psi(a);
  const double pb = psi(b);
  const double dpa = pa / (a * a);
  const double dpb = pb / (b * b);
  const double den = pa + pb;
  return -(dpa * pb + pa * dpb) / (den * den);
}

TabulatedTerm::TabulatedTerm(std::vector<double> u, std::vector<double> f)
    : u_(std::move(u)), f_(std::move(f)) {
  if (u_.size() != f_.size()) throw ConfigError("tabulated nonlinearity: u and f differ in length");
  if (u_.size() < 2) throw ConfigError("tabulated nonlinearity needs at least two knots");
  check_sorted(u_, "tabulated nonlinearity");
  for (double v : f_)
    if (!std::isfinite(v)) throw ConfigError("tabulated nonlinearity holds a non-finite value");
  cumulative_.assign(u_.size(), 0.0);
  for (std::size_t i = 1; i < u_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + 0.5 * (f_[i] + f_[i - 1]) * (u_[i] - u_[i - 1]);
  origin_ = antiderivative(0.0);
}

double TabulatedTerm::f(double u) const {
  const std::size_t i = segment(u_, u);
  const double s = (u - u_[i]) / (u_[i + 1] - u_[i]);
  return (1.0 - s) * f_[i] + s * f_[i + 1];
}

// Integral of the interpolant from the first knot (negative below it).
double TabulatedTerm::antiderivative(double u) const {
  const std::size_t i = segment(u_, u);
  const double d = u - u_[i];
  const double slope = (f_[i + 1] - f_[i]) / (u_[i + 1] - u_[i]);
  return cumulative_[i] + f_[i] * d + 0.5 * slope * d * d;
}

double TabulatedTerm::F(double u) const { return antiderivative(u) - origin_; }

std::string term_name(const Term& term) {
  return std::visit(overloaded{
                        [](const KirchhoffExampleTerm&) { return std::string("kirchhoff-example"); },
                        [](const ArViolatorTerm&) { return std::string("ar-violator"); },
                        [](const SublinearOriginTerm&) { return std::string("sublinear-origin"); },
                        [](const PowerTerm&) { return std::string("power"); },
                        [](const TabulatedTerm&) { return std::string("tabulated"); },
                    },
                    term);
}

double Nonlinearity::f(const Point& x, double u) const {
  double sum = linear_shift_ * u;
  for (const Term& t : terms_) {
    sum += std::visit(
        overloaded{
            [&](const KirchhoffExampleTerm& k) { return eval_example_f(k.a(radius_of(x)), u); },
            [&](const ArViolatorTerm&) { return eval_ar_violator(u, x[0]); },
            [&](const SublinearOriginTerm& s) {
              const double au = std::abs(u);
              double v = 4.0 * u * u * u;
              if (au > 0.0)
                v += s.c3 * sgn(u) *
                     (s.tau * std::pow(au, s.tau - 1.0) * smooth_cutoff(au) +
                      std::pow(au, s.tau) * smooth_cutoff_derivative(au));
              return v;
            },
            [&](const PowerTerm& p) {
              return u == 0.0 ? 0.0 : p.coef * std::pow(std::abs(u), p.p - 2.0) * u;
            },
            [&](const TabulatedTerm& t) { return t.f(u); },
        },
        t);
  }
  return sum;
}

double Nonlinearity::F(const Point& x, double u) const {
  double sum = 0.5 * linear_shift_ * u * u;
  for (const Term& t : terms_) {
    sum += std::visit(
        overloaded{
            [&](const KirchhoffExampleTerm& k) { return eval_example_F(k.a(radius_of(x)), u); },
            [&](const ArViolatorTerm&) { return eval_ar_violator_primitive(u, x[0]); },
            [&](const SublinearOriginTerm& s) {
              const double au = std::abs(u);
              const double u2 = u * u;
              double v = u2 * u2;
              if (au > 0.0) v += s.c3 * std::pow(au, s.tau) * smooth_cutoff(au);
              return v;
            },
            [&](const PowerTerm& p) {
              return u == 0.0 ? 0.0 : p.coef * std::pow(std::abs(u), p.p) / p.p;
            },
            [&](const TabulatedTerm& t) { return t.F(u); },
        },
        t);
  }
  return sum;
}

bool Nonlinearity::radial() const {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](const Term& t) { return std::holds_alternative<ArViolatorTerm>(t); });
}

bool Nonlinearity::zero() const { return terms_.empty() && linear_shift_ == 0.0; }

Nonlinearity Nonlinearity::with_linear_shift(double extra) const {
  Nonlinearity n = *this;
  n.linear_shift_ += extra;
  return n;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) os << (i ? " + " : "") << term_name(terms_[i]);
  if (terms_.empty()) os << "zero";
  if (linear_shift_ != 0.0) os << " + " << linear_shift_ << "*u";
  return os.str();
}

void validate(const ProblemSpec& spec) {
  if (!(spec.b >= 0.0) || !std::isfinite(spec.b))
    throw ConfigError("b must be a finite nonnegative number");
  if (spec.v0 && (!(*spec.v0 >= 0.0) || !std::isfinite(*spec.v0)))
    throw ConfigError("V0 must be a finite nonnegative number");
  if (spec.potential.kind() != PotentialKind::tabulated &&
      !std::isfinite(spec.potential.constant_value()))
    throw ConfigError("potential parameter must be finite");
  for (const Term& t : spec.nonlinearity.terms()) {
    if (const auto* k = std::get_if<KirchhoffExampleTerm>(&t)) {
      const double lo = k->amplitude_table.empty() ? k->amplitude : k->amplitude_table.min();
      const double hi = k->amplitude_table.empty() ? k->amplitude : k->amplitude_table.max();
      if (!(lo > 0.0) || !std::isfinite(hi))
        throw ConfigError("amplitude a(x) needs 0 < inf a <= sup a < inf");
    } else if (const auto* s = std::get_if<SublinearOriginTerm>(&t)) {
      if (!(s->tau > 0.0 && s->tau < 2.0)) throw ConfigError("sublinear-origin needs tau in (0, 2)");
      if (!(s->c3 >= 0.0) || !std::isfinite(s->c3)) throw ConfigError("sublinear-origin needs c3 >= 0");
    } else if (const auto* p = std::get_if<PowerTerm>(&t)) {
      if (!(p->p > 1.0) || !std::isfinite(p->p) || !std::isfinite(p->coef))
        throw ConfigError("power term needs a finite exponent p > 1");
    }
  }
}

double auto_shift(const Potential& potential) { return std::max(0.0, 1.0 - potential.infimum()); }

ProblemSpec shift_problem(const ProblemSpec& spec) {
  if (spec.shifted) return spec;
  ProblemSpec out = spec;
  const double v0 = spec.v0 ? *spec.v0 : auto_shift(spec.potential);
  out.potential = spec.potential.with_offset(v0);
  out.nonlinearity = spec.nonlinearity.with_linear_shift(v0);
  out.applied_shift = v0;
  out.v0 = v0;
  out.shifted = true;
  return out;
}

}  // namespace kirchhoff
