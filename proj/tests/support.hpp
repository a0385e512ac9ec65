#pragma once

#include <random>

#include "kirchhoff/functional.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff::test {

inline ProblemSpec with_terms(std::vector<Term> terms, Potential v = Potential::zigzag(0.0), double b = 1.0) {
  ProblemSpec spec;
  spec.b = b;
  spec.potential = std::move(v);
  spec.nonlinearity = Nonlinearity(std::move(terms));
  return spec;
}

inline ProblemSpec kirchhoff_example() { return with_terms({KirchhoffExampleTerm{1.0, {}}}); }
inline ProblemSpec sublinear_origin() { return with_terms({SublinearOriginTerm{1.0, 1.0}}); }
/// f-tilde = 0: no terms and inf V = 1, so the shift adds nothing.
inline ProblemSpec zero_nonlinearity() { return with_terms({}, Potential::zigzag(1.0)); }

/// sublinear-origin (c3 = tau = 1) plus the quintic kirchhoff-example term.
inline ProblemSpec composite() {
  return with_terms({SublinearOriginTerm{1.0, 1.0}, KirchhoffExampleTerm{1.0, {}}});
}

/// b = 0, V = 1, f = u^3.
inline ProblemSpec pure_cubic() { return with_terms({PowerTerm{1.0, 4.0}}, Potential::constant(1.0), 0.0); }

/// Smooth random radial field vanishing at R: sum of a few seeded bumps.
inline Field random_field(const RadialGrid& grid, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  const double R = grid.radius();
  const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
  const double w1 = width(rng), w2 = width(rng);
  return sample_field(grid, [&](double r) {
    const double taper = (R - r) / R;
    return scale * taper * (a1 * std::exp(-r * r / (w1 * w1)) + a2 * std::exp(-r * r / (w2 * w2)) +
                            a3 * std::cos(3.0 * r / R) * std::exp(-r / R));
  });
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace kirchhoff::test
