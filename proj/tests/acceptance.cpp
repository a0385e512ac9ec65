// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "kirchhoff/checkers.hpp"
#include "kirchhoff/geometry.hpp"
#include "kirchhoff/report.hpp"
#include "kirchhoff/solvers.hpp"
#include "shooting.hpp"
#include "support.hpp"

using namespace kirchhoff;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path d = [] {
    const fs::path p = fs::temp_directory_path() / ("kirchhoff_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + KIRCHHOFF_CLI + " " + args + " 2>>" +
                          (scratch() / "cli.log").string() + " >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(KIRCHHOFF_CONFIG_DIR) + "/" + name; }

// 1. Finite differences of the energy against the assembled derivative.
Outcome gradient_consistency() {
  constexpr double kRelTol = 1e-6;
  constexpr double kMinOrder = 1.8;
  const std::array<double, 3> hs{1e-4, 1e-5, 1e-6};
  const RadialGrid g = build_grid(4.0, 64);
  Outcome out{true, ""};
  const std::vector<std::pair<std::string, ProblemSpec>> problems{
      {"kirchhoff-example", test::kirchhoff_example()},
      {"sublinear-origin", test::sublinear_origin()},
      {"zero", test::zero_nonlinearity()}};
  for (const auto& [name, spec] : problems) {
    const KirchhoffFunctional I(shift_problem(spec), g);
    std::mt19937_64 rng(7);
    double worst_rel = 0.0;
    double worst_order = 1e300;
    int order_pairs = 0;
    int roundoff_pairs = 0;
    for (int k = 0; k < 20; ++k) {
      const Vec u = test::random_field(g, rng).values;
      const Vec v = test::random_field(g, rng).values;
      const double nu = I.norm(u);
      const double exact = I.derivative(u).dot(v);
      std::array<double, 3> err{};
      std::array<double, 3> floor{};
      for (int j = 0; j < 3; ++j) {
        const double h = hs[j] * nu;
        const double ep = I.energy(u + h * v);
        const double em = I.energy(u - h * v);
        const double fd = (ep - em) / (2.0 * h);
        err[j] = std::abs(fd - exact);
        // Rounding in the energy difference alone.
        floor[j] = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(ep) + std::abs(em)) / (2.0 * h);
        worst_rel = std::max(worst_rel, err[j] / std::max(1.0, std::abs(exact)));
      }
      for (int j = 0; j + 1 < 3; ++j) {
        // A pair says something about the truncation order only while the
        // finer error is still above the rounding floor.
        if (err[j + 1] <= floor[j + 1]) {
          ++roundoff_pairs;
          continue;
        }
        ++order_pairs;
        worst_order = std::min(worst_order, std::log10(err[j] / err[j + 1]) / std::log10(hs[j] / hs[j + 1]));
      }
    }
    const bool ok = worst_rel <= kRelTol && order_pairs > 0 && worst_order >= kMinOrder;
    out.pass = out.pass && ok;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += fmt("%s: max rel err %.2e, min order %.2f over %d pairs (%d at rounding floor)", name.c_str(),
                      worst_rel, order_pairs ? worst_order : 0.0, order_pairs, roundoff_pairs);
  }
  return out;
}

// 2. Gaussian gradient energy.
Outcome quadrature_oracles() {
  constexpr double kAbsTol = 1e-5;
  constexpr double kMinOrder = 2.0;
  const double exact = 1.5 * std::pow(pi, 1.5);
  std::array<double, 3> err{};
  int k = 0;
  for (int n : {128, 256, 512}) {
    const RadialGrid g = build_grid(8.0, n);
    err[k++] = std::abs(gradient_energy(g, sample_field(g, [](double r) { return std::exp(-r * r / 2.0); })) - exact);
  }
  const double o1 = std::log2(err[0] / err[1]);
  const double o2 = std::log2(err[1] / err[2]);
  return {err[2] <= kAbsTol && o1 >= kMinOrder && o2 >= kMinOrder,
          fmt("errors %.3e %.3e %.3e, orders %.2f %.2f", err[0], err[1], err[2], o1, o2)};
}

// 3. Shifting V and f together leaves I and I' unchanged.
Outcome shift_neutrality() {
  constexpr double kTol = 1e-12;
  const RadialGrid g = build_grid(8.0, 256);
  const ProblemSpec orig = test::composite();
  const ProblemSpec shifted = shift_problem(orig);
  std::mt19937_64 rng(3);
  double worst_e = 0.0, worst_d = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Field u = test::random_field(g, rng, 1.5);
    const double e0 = raw_energy(orig, g, u).total;
    const double e1 = raw_energy(shifted, g, u).total;
    worst_e = std::max(worst_e, std::abs(e0 - e1) / (1.0 + std::abs(e0)));
    const Vec d0 = raw_derivative(orig, g, u);
    const Vec d1 = raw_derivative(shifted, g, u);
    worst_d = std::max(worst_d, (d0 - d1).lpNorm<Eigen::Infinity>() / (1.0 + d0.lpNorm<Eigen::Infinity>()));
  }
  return {worst_e <= kTol && worst_d <= kTol && shifted.applied_shift > 0.0,
          fmt("V0 = %g, energy %.2e, gradient %.2e", shifted.applied_shift, worst_e, worst_d)};
}

// 4. Composite problem end to end through the CLI.
Outcome two_solutions() {
  const fs::path out = scratch() / "composite";
  const int code = run_cli("solve --config " + config("composite.json") + " --output " + out.string());
  if (!fs::exists(out / "report.json")) return {false, fmt("exit %d, no report", code)};
  const Json rep = Json::parse(slurp(out / "report.json"));
  const double l1 = rep["step1"]["level"].get<double>();
  const double l2 = rep["step2"]["level"].get<double>();
  const double r1 = rep["step1"]["residual"].get<double>();
  const double r2 = rep["step2"]["residual"].get<double>();
  const double dist = rep["distinctness"]["distance"].get<double>();
  const bool ok = code == 0 && l1 < -1e-4 && l2 > 1e-4 && r1 <= 1e-6 && r2 <= 1e-6 && dist >= 0.1;
  return {ok, fmt("exit %d, levels %.9g / %.9g, residuals %.2e / %.2e, distance %.6g", code, l1, l2, r1, r2, dist)};
}

// 5. Pure cubic mountain pass against radial shooting.
Outcome mountain_pass_oracle() {
  constexpr double kRelTol = 1e-3;
  const double alpha = test::bisect_alpha(8.0);
  const double oracle = 0.25 * test::shoot(alpha, 8.0).quartic;
  const RadialGrid g = build_grid(8.0, 512);
  const KirchhoffFunctional I(shift_problem(test::pure_cubic()), g);
  const GeometryReport geo = certify_geometry(I, GeometryOptions{});
  if (!geo.holds) return {false, "geometry failed: " + geo.failure};
  const MountainPassResult mp = mountain_pass(I, geo.scan->e.values, SolverConfig{}, geo.sphere.eta);
  const double rel = test::rel_err(mp.point.level, oracle);
  return {mp.point.converged && rel <= kRelTol,
          fmt("level %.10g, shooting %.10g, rel err %.2e", mp.point.level, oracle, rel)};
}

// 6. One-dimensional saddle of t^2/2 - t^4/4.
Outcome surrogate_saddle() {
  constexpr double kTol = 1e-8;
  const EuclideanProblem I(
      1, [](const Vec& u) { return 0.5 * u[0] * u[0] - 0.25 * std::pow(u[0], 4); },
      [](const Vec& u) { return Vec::Constant(1, u[0] - std::pow(u[0], 3)); });
  SolverConfig cfg;
  cfg.tol_residual = 1e-10;
  const MountainPassResult mp = mountain_pass(I, Vec::Constant(1, 2.0), cfg, 0.0);
  const double dl = std::abs(mp.point.level - 0.25);
  const double dt = std::abs(std::abs(mp.point.u[0]) - 1.0);
  return {mp.point.converged && dl <= kTol && dt <= kTol, fmt("level err %.2e, |t - 1| = %.2e", dl, dt)};
}

// 7. Hypothesis checkers.
Outcome checker_regressions() {
  const Nonlinearity example({KirchhoffExampleTerm{1.0, {}}});
  std::string d;
  const ConditionReport ar = check_AR(Nonlinearity({ArViolatorTerm{}}), SampleSpec{});
  const bool ar_ok = ar.verdict == Verdict::fail && !ar.counterexamples.empty();
  d += fmt("AR %s (%zu counterexamples); ", to_string(ar.verdict).c_str(), ar.counterexamples.size());

  const ConditionReport s1 = check_S1(example, SampleSpec{});
  const bool s1_ok = s1.verdict == Verdict::pass && s1.get("q") == 5.0;
  d += fmt("S1 %s q = %g; ", to_string(s1.verdict).c_str(), s1.get("q").value_or(NAN));

  auto lower = [](const ConditionReport& r) {
    for (const SubCheck& s : r.subchecks)
      if (s.name == "lower-bound") return s.verdict;
    return Verdict::inconclusive;
  };
  const ConditionReport full = check_S2(example, SampleSpec{});
  SampleSpec pos;
  pos.range = SignRange::nonnegative;
  const ConditionReport half = check_S2(example, pos);
  const bool s2_ok = lower(full) == Verdict::fail && lower(half) == Verdict::pass;
  d += fmt("S2(b) full %s, u >= 0 %s; ", to_string(lower(full)).c_str(), to_string(lower(half)).c_str());

  V1Options v;
  v.d0 = 1.0;
  v.levels = {2.0};
  v.y_radii = {5.0, 10.0, 20.0};
  v.samples = 1000000;
  const ConditionReport v1 = check_V1(Potential::zigzag(0.0), v);
  const double m5 = v1.get("meas[M=2,|y|=5]").value_or(NAN);
  const double m10 = v1.get("meas[M=2,|y|=10]").value_or(NAN);
  const double m20 = v1.get("meas[M=2,|y|=20]").value_or(NAN);
  const bool v1_ok = m5 > m10 && m10 > m20;
  d += fmt("V1 %.4f > %.4f > %.4f", m5, m10, m20);
  return {ar_ok && s1_ok && s2_ok && v1_ok, d};
}

// 8. Sphere certificate and negative-energy point on the composite problem.
Outcome geometry_certificate() {
  const RadialGrid g = build_grid(8.0, 256);
  const KirchhoffFunctional I(shift_problem(test::composite()), g);
  GeometryOptions opts;
  opts.sphere_samples = 256;
  const GeometryReport geo = certify_geometry(I, opts);
  const bool scan_ok = geo.scan && geo.scan->level < 0.0 && I.energy(geo.scan->e.values) < 0.0 &&
                       geo.scan->trend_decreasing;
  return {geo.sphere.eta > 0.0 && scan_ok && geo.rho_source != "config",
          fmt("rho %.6g (%s), eta %.6g, I(e) %.6g, trend %s", geo.sphere.rho, geo.rho_source.c_str(),
              geo.sphere.eta, geo.scan ? geo.scan->level : NAN,
              geo.scan && geo.scan->trend_decreasing ? "decreasing" : "not decreasing")};
}

// 9. Two identical solves, the second capped at one thread.
Outcome determinism() {
  const fs::path out = scratch() / "determinism";
  const std::string args = "solve --config " + config("composite.json") + " --seed 7 --output " + out.string();
  const std::vector<std::string> files{"step1.csv", "step2.csv", "step1_trace.csv", "step2_trace.csv"};
  const int c1 = run_cli(args);
  std::vector<std::string> first;
  for (const std::string& f : files) first.push_back(slurp(out / f));
  const std::string rep1 = dump_report(strip_timings(Json::parse(slurp(out / "report.json"))));
  const int c2 = run_cli(args, "THREADS=1");
  bool same = c1 == c2;
  std::string diff;
  for (std::size_t k = 0; k < files.size(); ++k)
    if (slurp(out / files[k]) != first[k] || first[k].empty()) {
      same = false;
      diff += files[k] + " ";
    }
  const std::string rep2 = dump_report(strip_timings(Json::parse(slurp(out / "report.json"))));
  if (rep1 != rep2) {
    same = false;
    diff += "report.json ";
  }
  return {same, same ? fmt("exit %d twice, report and 4 CSVs byte-identical", c1) : "differs: " + diff};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gradient consistency", 10.0, gradient_consistency},
      {2, "quadrature oracles", 1.0, quadrature_oracles},
      {3, "shift neutrality", 1.0, shift_neutrality},
      {4, "two-solution reproduction", 300.0, two_solutions},
      {5, "mountain-pass oracle", 120.0, mountain_pass_oracle},
      {6, "1-D surrogate saddle", 1.0, surrogate_saddle},
      {7, "hypothesis checkers", 60.0, checker_regressions},
      {8, "geometry certification", 30.0, geometry_certificate},
      {9, "determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    if (!pass) ++failures;
    std::printf("criterion %d %s: %s (%.2f s, budget %.0f s) %s\n", c.id, c.name.c_str(), pass ? "PASS" : "FAIL",
                secs, c.budget_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  fs::remove_all(scratch());
  return failures == 0 ? 0 : 1;
}
