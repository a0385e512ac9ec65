#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kirchhoff/geometry.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

enum class SignRange { full, nonnegative };

SignRange parse_sign_range(std::string_view name);
std::string to_string(SignRange r);

/// Nested (x, u) lattice. Magnitudes are a log grid on [u_min, U] and a
/// linear grid on (0, U], each with `intervals` intervals, so doubling
/// `intervals` only adds points. A log grid on [U, extension * U] probes
/// growth beyond the fitting range.
struct SampleSpec {
  double U = 50.0;
  int intervals = 2500;
  double u_min = 1e-3;
  double extension = 10.0;
  SignRange range = SignRange::full;
  std::vector<Point> x = default_x();

  static std::vector<Point> default_x();
  std::vector<double> magnitudes() const;
  std::vector<double> extension_magnitudes() const;
  /// Signed values for a set of magnitudes according to `range`.
  std::vector<double> signed_values(const std::vector<double>& mags) const;
  std::string describe() const;
};

using Named = std::vector<std::pair<std::string, double>>;

struct Counterexample {
  Point x{};
  double u = 0.0;
  double slack = 0.0;  ///< signed; negative violates
  Named values;
};

struct SubCheck {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  double margin = 0.0;
  std::string note;
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  double margin = 0.0;
  Named fitted;
  std::string samples;
  std::vector<Counterexample> counterexamples;
  std::vector<SubCheck> subchecks;
  std::vector<std::string> warnings;

  std::optional<double> get(std::string_view key) const;
};

struct V1Options {
  double d0 = 1.0;
  std::vector<double> levels{2.0};
  std::vector<double> y_radii{5.0, 10.0, 20.0};
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
};

/// Monte-Carlo sublevel measure in B_{d0}(y), y = (|y|, 0, 0), with common
/// random numbers across |y|. Consecutive estimates over the three largest
/// radii must drop by more than three binomial standard errors.
ConditionReport check_V1(const Potential& potential, const V1Options& opts);

ConditionReport check_S1(const Nonlinearity& f, const SampleSpec& samples, double r0 = 1.0);

struct S2Options {
  double r0 = 1.0;
  double divergence_factor = 10.0;
};

ConditionReport check_S2(const Nonlinearity& f, const SampleSpec& samples, const S2Options& opts = {});

ConditionReport check_S3(const Nonlinearity& f, const SampleSpec& samples, double r0 = 1.0);

std::vector<double> default_mu_grid();

ConditionReport check_AR(const Nonlinearity& f, const SampleSpec& samples,
                         const std::vector<double>& mu_grid = default_mu_grid());

/// (c1, c2, q) from a passing S1 report.
std::optional<GrowthConstants> growth_constants(const ConditionReport& s1);

}  // namespace kirchhoff
