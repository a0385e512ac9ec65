// Independent local minimiser: Ceres L-BFGS on the coefficient vector from
// many seeded small starts. Its lowest minimum inside the ball must agree with
// the projected-gradient ball minimiser.
#include <cstdio>
#include <random>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <glog/logging.h>

#include "kirchhoff/geometry.hpp"
#include "kirchhoff/solvers.hpp"
#include "support.hpp"

using namespace kirchhoff;

namespace {

class Energy final : public ceres::FirstOrderFunction {
 public:
  explicit Energy(const KirchhoffFunctional& I) : I_(I) {}
  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    const Vec u = Eigen::Map<const Vec>(x, I_.dimension());
    *cost = I_.energy(u);
    if (gradient) Eigen::Map<Vec>(gradient, I_.dimension()) = I_.derivative(u);
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return I_.dimension(); }

 private:
  const KirchhoffFunctional& I_;
};

}  // namespace

int main(int, char** argv) {
  // Line-search fallbacks are expected on the kinked energy; keep stderr quiet.
  FLAGS_minloglevel = google::GLOG_ERROR;
  google::InitGoogleLogging(argv[0]);
  const RadialGrid g = build_grid(8.0, 32);
  const KirchhoffFunctional I(shift_problem(test::sublinear_origin()), g);
  // Large enough that the minimiser (norm about 16.7) is interior.
  const double rho = 50.0;

  const Vec start = 1e-2 * default_direction(I).values;
  SolverConfig cfg;
  cfg.tol_residual = 1e-9;
  const CriticalPoint ours = minimize_in_ball(I, rho, start, cfg);
  if (!ours.converged || ours.on_boundary || !(ours.level < 0.0)) {
    std::printf("ball minimiser: converged %d, on boundary %d, level %.12g\n", ours.converged, ours.on_boundary,
                ours.level);
    return 1;
  }

  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::LBFGS;
  opts.max_num_iterations = 20000;
  opts.function_tolerance = 1e-15;
  opts.gradient_tolerance = 1e-13;
  opts.parameter_tolerance = 1e-14;
  const ceres::GradientProblem problem(new Energy(I));

  std::mt19937_64 rng(2024);
  double best = 0.0;
  Vec best_u;
  int inside = 0;
  for (int k = 0; k < 24; ++k) {
    Vec x = test::random_field(g, rng, 0.3).values;
    if (k % 2) x = x.cwiseAbs();
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(opts, problem, x.data(), &summary);
    if (I.norm(x) >= rho) continue;
    ++inside;
    if (summary.final_cost < best) {
      best = summary.final_cost;
      best_u = x;
    }
  }
  std::printf("ball minimiser %.12g, multistart best %.12g from %d runs inside the ball\n", ours.level, best, inside);
  if (inside == 0) return 1;
  // Same minimiser up to sign.
  const double d = std::min(I.norm(ours.u - best_u), I.norm(ours.u + best_u));
  std::printf("H-distance between minimisers %.3e (|u| = %.6g)\n", d, I.norm(best_u));
  const bool ok = test::rel_err(ours.level, best) <= 1e-6 && ours.level <= best + 1e-9 * std::abs(best) &&
                  d <= 1e-3 * I.norm(best_u);
  std::printf("%s\n", ok ? "agree" : "disagree");
  return ok ? 0 : 1;
}
