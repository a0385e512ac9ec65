#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/functional.hpp"
#include "kirchhoff/model.hpp"
#include "support.hpp"

using namespace kirchhoff;
using std::numbers::pi;

namespace {

// Quadrature of f over [0, u], split at every half-integer so the kinks
// (|u|^tau at 0, the cutoff ends at 1 and 2, table knots) sit on panel ends.
double primitive_oracle(const Nonlinearity& nl, const Point& x, double u) {
  double total = 0.0;
  const double dir = u > 0.0 ? 1.0 : -1.0;
  for (double a = 0.0; a < std::abs(u); a += 0.5) {
    const double b = std::min(a + 0.5, std::abs(u));
    auto g = [&](double s) { return nl.f(x, dir * s); };
    // tanh-sinh copes with the |u|^(tau-1) endpoint singularity of the first panel.
    total += dir * (a == 0.0 ? boost::math::quadrature::tanh_sinh<double>().integrate(g, a, b)
                             : boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 12, 1e-13));
  }
  return total;
}

std::vector<std::pair<std::string, Nonlinearity>> catalog() {
  return {
      {"kirchhoff-example", Nonlinearity({KirchhoffExampleTerm{1.0, {}}})},
      {"kirchhoff-example a(r)", Nonlinearity({KirchhoffExampleTerm{1.0, RadialTable({0.0, 2.0, 4.0}, {1.0, 3.0, 0.5})}})},
      {"ar-violator", Nonlinearity({ArViolatorTerm{}})},
      {"sublinear-origin", Nonlinearity({SublinearOriginTerm{1.0, 1.0}})},
      {"sublinear-origin tau 0.4", Nonlinearity({SublinearOriginTerm{2.5, 0.4}})},
      {"power", Nonlinearity({PowerTerm{1.0, 4.0}})},
      {"power 5.5", Nonlinearity({PowerTerm{0.3, 5.5}})},
      {"tabulated", Nonlinearity({TabulatedTerm({-2.0, 0.5, 1.0, 3.0}, {1.0, -1.0, 2.0, 0.0})})},
      {"shifted composite", Nonlinearity({SublinearOriginTerm{1.0, 1.0}, KirchhoffExampleTerm{1.0, {}}}, 3.0)},
  };
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("zigzag values at teeth and troughs") {
    CHECK(eval_zigzag(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(eval_zigzag(0.5, 0.0) == doctest::Approx(1.0));
    CHECK(eval_zigzag(2.5, 7.0) == doctest::Approx(10.0));
    for (int n = 1; n <= 20; ++n) {
      CHECK(eval_zigzag(n, -1.5) == doctest::Approx(-1.5));
      CHECK(eval_zigzag((2.0 * n - 1.0) / 2.0, -1.5) == doctest::Approx(n - 1.5));
    }
    CHECK(eval_zigzag(0.0, 0.0) == doctest::Approx(0.0));
  }

  TEST_CASE("zigzag is continuous at every breakpoint") {
    const double eps = 1e-12;
    for (int n = 1; n <= 20; ++n)
      for (double r : {static_cast<double>(n), (2.0 * n - 1.0) / 2.0})
        CHECK(std::abs(eval_zigzag(r - eps, 0.3) - eval_zigzag(r + eps, 0.3)) <= 1e-10);
  }

  TEST_CASE("zigzag minimum over a fine sample is a0") {
    double m = 1e300;
    for (int k = 0; k <= 200000; ++k) m = std::min(m, eval_zigzag(k * 1e-4, 2.0));
    CHECK(m == doctest::Approx(2.0));
    CHECK(Potential::zigzag(2.0).infimum() == 2.0);
  }

  TEST_CASE("example nonlinearity values") {
    CHECK(eval_example_f(1.0, 0.0) == 0.0);
    CHECK(eval_example_F(1.0, 0.0) == 0.0);
    CHECK(eval_example_f(1.0, pi) == doctest::Approx(4.0 * std::pow(pi, 4) + 4.0 * pi).epsilon(1e-14));
    CHECK(eval_example_F(1.0, pi) == doctest::Approx(0.8 * std::pow(pi, 5) + 2.0 * pi * pi).epsilon(1e-14));
    const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double s) { return eval_example_f(1.0, s); }, 0.0, pi, 10, 1e-15);
    CHECK(quad == doctest::Approx(eval_example_F(1.0, pi)).epsilon(1e-12));
    for (double u : {-3.0, -0.2, 0.7, 5.0}) {
      CHECK(eval_example_f(2.0, u) == 2.0 * eval_example_f(1.0, u));
      CHECK(eval_example_F(2.0, u) == 2.0 * eval_example_F(1.0, u));
    }
  }

  TEST_CASE("ar-violator values") {
    CHECK(eval_ar_violator(0.0, 0.7) == 0.0);
    CHECK(eval_ar_violator(std::numbers::e - 1.0, pi / 2.0) ==
          doctest::Approx(std::pow(std::numbers::e - 1.0, 2)).epsilon(1e-14));
    for (double u : {-4.0, 0.3, 9.0}) CHECK(eval_ar_violator(u, 0.0) == 0.0);
  }

  TEST_CASE("primitives match quadrature of f on u in [-10, 10]") {
    const std::vector<Point> xs{{0.0, 0.0, 0.0}, {0.7, 0.0, 0.0}, {-1.9, 0.5, 0.0}, {3.3, 0.0, 1.0}};
    for (const auto& [name, nl] : catalog()) {
      CAPTURE(name);
      for (const Point& x : xs) {
        CHECK(nl.F(x, 0.0) == 0.0);
        for (int k = -40; k <= 40; ++k) {
          const double u = k * 0.25 + (k % 3) * 0.013;
          const double F = nl.F(x, u);
          CAPTURE(u);
          CHECK(std::abs(F - primitive_oracle(nl, x, u)) <= 1e-8 * (1.0 + std::abs(F)));
        }
      }
    }
  }

  TEST_CASE("sublinear-origin behaves like c3 |u|^tau near 0 and u^4 beyond 2") {
    const Nonlinearity nl({SublinearOriginTerm{1.5, 0.5}});
    CHECK(nl.F(0.0, 0.25) == doctest::Approx(1.5 * 0.5 + std::pow(0.25, 4)).epsilon(1e-14));
    CHECK(nl.F(0.0, -3.0) == doctest::Approx(81.0).epsilon(1e-14));
    CHECK(nl.f(0.0, 0.0) == 0.0);
    CHECK(smooth_cutoff(0.5) == 1.0);
    CHECK(smooth_cutoff(2.5) == 0.0);
    CHECK(smooth_cutoff(1.5) > 0.0);
    CHECK(smooth_cutoff(1.5) < 1.0);
  }

  TEST_CASE("shift examples") {
    ProblemSpec neg = test::with_terms({PowerTerm{1.0, 4.0}}, Potential::constant(-2.0));
    const ProblemSpec s = shift_problem(neg);
    CHECK(s.shifted);
    CHECK(s.applied_shift == 3.0);
    CHECK(s.potential(0.3) == doctest::Approx(1.0));
    CHECK(s.potential.infimum() == doctest::Approx(1.0));
    CHECK(s.nonlinearity.f(0.0, 2.0) == doctest::Approx(8.0 + 6.0));
    CHECK(s.nonlinearity.F(0.0, 2.0) == doctest::Approx(4.0 + 6.0));

    ProblemSpec five = test::with_terms({PowerTerm{1.0, 4.0}}, Potential::constant(5.0));
    const ProblemSpec s5 = shift_problem(five);
    CHECK(s5.applied_shift == 0.0);
    CHECK(s5.potential(2.0) == 5.0);
    CHECK(s5.nonlinearity.f(0.0, 2.0) == 8.0);

    CHECK(shift_problem(test::with_terms({}, Potential::zigzag(-3.0))).applied_shift == 4.0);
    CHECK(auto_shift(Potential::tabulated(RadialTable({0.0, 1.0, 2.0}, {3.0, -0.5, 2.0}))) == 1.5);
  }

  TEST_CASE("explicit V0 is honoured and shifting twice changes nothing") {
    ProblemSpec spec = test::with_terms({PowerTerm{1.0, 4.0}}, Potential::constant(-2.0));
    spec.v0 = 5.0;
    const ProblemSpec s = shift_problem(spec);
    CHECK(s.applied_shift == 5.0);
    const ProblemSpec ss = shift_problem(s);
    CHECK(ss.applied_shift == 5.0);
    CHECK(ss.potential(1.0) == s.potential(1.0));
    CHECK(ss.nonlinearity.f(0.0, 1.3) == s.nonlinearity.f(0.0, 1.3));
  }

  TEST_CASE("shift leaves the energy unchanged") {
    const RadialGrid g = build_grid(6.0, 128);
    std::mt19937_64 rng(11);
    for (ProblemSpec spec : {test::kirchhoff_example(), test::composite(),
                             test::with_terms({PowerTerm{1.0, 4.0}}, Potential::constant(-2.0))}) {
      const ProblemSpec s = shift_problem(spec);
      for (int k = 0; k < 5; ++k) {
        const Field u = test::random_field(g, rng, 0.8);
        const double e0 = raw_energy(spec, g, u).total;
        const double e1 = raw_energy(s, g, u).total;
        CHECK(std::abs(e0 - e1) <= 1e-12 * (1.0 + std::abs(e0)));
        const Vec d0 = raw_derivative(spec, g, u);
        const Vec d1 = raw_derivative(s, g, u);
        CHECK((d0 - d1).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + d0.lpNorm<Eigen::Infinity>()));
      }
    }
  }

  TEST_CASE("validate rejects bad parameters") {
    ProblemSpec spec = test::kirchhoff_example();
    spec.b = -1.0;
    CHECK_THROWS_AS(validate(spec), ConfigError);
    spec.b = 0.0;
    CHECK_NOTHROW(validate(spec));

    CHECK_THROWS_AS(validate(test::with_terms({KirchhoffExampleTerm{1.0, RadialTable({0.0, 1.0}, {1.0, 0.0})}})),
                    ConfigError);
    CHECK_THROWS_AS(validate(test::with_terms({KirchhoffExampleTerm{-1.0, {}}})), ConfigError);
    CHECK_THROWS_AS(validate(test::with_terms({SublinearOriginTerm{1.0, 2.0}})), ConfigError);
    CHECK_THROWS_AS(validate(test::with_terms({SublinearOriginTerm{-1.0, 1.0}})), ConfigError);
    CHECK_THROWS_AS(validate(test::with_terms({PowerTerm{1.0, 1.0}})), ConfigError);
    ProblemSpec v0 = test::kirchhoff_example();
    v0.v0 = -0.1;
    CHECK_THROWS_AS(validate(v0), ConfigError);
  }

  TEST_CASE("radial tables interpolate linearly and extrapolate flat") {
    const RadialTable t({1.0, 2.0, 4.0}, {0.0, 2.0, -2.0});
    CHECK(t(0.0) == 0.0);
    CHECK(t(1.5) == doctest::Approx(1.0));
    CHECK(t(3.0) == doctest::Approx(0.0));
    CHECK(t(9.0) == -2.0);
    CHECK(t.min() == -2.0);
    CHECK(t.max() == 2.0);
    CHECK_THROWS_AS(RadialTable({1.0, 1.0}, {0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(RadialTable({1.0, 2.0}, {0.0}), ConfigError);
  }

  TEST_CASE("radial and non-radial nonlinearities") {
    CHECK(Nonlinearity({KirchhoffExampleTerm{1.0, {}}}).radial());
    CHECK_FALSE(Nonlinearity({ArViolatorTerm{}}).radial());
    CHECK(Nonlinearity().zero());
    CHECK_FALSE(Nonlinearity({PowerTerm{}}).zero());
  }
}
