#include "kirchhoff/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/functional.hpp"
#include "kirchhoff/kernels.hpp"
#include "kirchhoff/report.hpp"

namespace kirchhoff {

namespace {

namespace fs = std::filesystem;

// Human-readable progress; reports and exit codes carry the results.
void log(const char* fmt, auto... args) {
  std::fprintf(stderr, "[kirchhoff] ");
  if constexpr (sizeof...(args) == 0)
    std::fputs(fmt, stderr);
  else
    std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Json base_report(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["command"] = command;
  j["config"] = cfg.effective;
  return j;
}

void finish(RunOutcome& out, const RunConfig& cfg, Json timings) {
  timings["threads"] = thread_count();
  out.report["exit"] = out.exit_code;
  out.report["versions"] = versions();
  out.report["timings"] = std::move(timings);
  const fs::path path = fs::path(cfg.output_dir) / "report.json";
  write_atomic(path, dump_report(out.report));
  out.files.push_back(path.string());
}

std::vector<CheckRequest> requested_checks(const RunConfig& cfg) {
  if (!cfg.checks.empty()) return cfg.checks;
  std::vector<CheckRequest> all;
  for (const char* c : {"V1", "S1", "S2", "S3", "AR"}) {
    CheckRequest r;
    r.condition = c;
    r.mu = default_mu_grid();
    r.v1.seed = cfg.seed;
    all.push_back(r);
  }
  return all;
}

ConditionReport run_check(const CheckRequest& req, const ProblemSpec& original, const ProblemSpec& shifted) {
  const Nonlinearity& f = shifted.nonlinearity;
  if (req.condition == "V1") return check_V1(original.potential, req.v1);
  if (req.condition == "S1") return check_S1(f, req.samples, req.r0);
  if (req.condition == "S2") return check_S2(f, req.samples, S2Options{req.r0, req.divergence_factor});
  if (req.condition == "S3") return check_S3(f, req.samples, req.r0);
  if (req.condition == "AR") return check_AR(f, req.samples, req.mu);
  throw ConfigError("unknown condition " + req.condition);
}

struct Hypotheses {
  Json json = Json::array();
  std::vector<ConditionReport> reports;
  std::optional<GrowthConstants> constants;
};

Hypotheses run_checks(const std::vector<CheckRequest>& checks, const ProblemSpec& original,
                      const ProblemSpec& shifted) {
  Hypotheses h;
  for (const CheckRequest& req : checks) {
    ConditionReport rep = run_check(req, original, shifted);
    log("%s: %s (margin %.6g)", rep.condition.c_str(), to_string(rep.verdict).c_str(), rep.margin);
    if (req.condition == "S1" && !h.constants) h.constants = growth_constants(rep);
    h.json.push_back(to_json(rep));
    h.reports.push_back(std::move(rep));
  }
  return h;
}

Json shift_json(const ProblemSpec& shifted) {
  return {{"V0", number(shifted.applied_shift)},
          {"inf_V_shifted", number(shifted.potential.infimum())},
          {"nonlinearity", shifted.nonlinearity.describe()}};
}

struct SolveRun {
  GeometryReport geometry;
  std::optional<CriticalPoint> step1;
  std::optional<MountainPassResult> step2;
  std::optional<DistinctReport> distinct;
  double h1 = 0.0;
  double h2 = 0.0;
  std::string failure;
  Json timings = Json::object();
};

SolveRun solve_on(const KirchhoffFunctional& I, const RunConfig& cfg, std::optional<GrowthConstants> constants) {
  SolveRun run;
  Stopwatch sw;
  run.geometry = certify_geometry(I, cfg.geometry, constants);
  run.timings["geometry"] = sw.lap();
  if (!run.geometry.holds) return run;

  const double rho = run.geometry.sphere.rho;
  // Start where the energy is already negative when such a point exists,
  // else from a small seeded random field.
  const Vec start = run.geometry.t_star ? Vec(*run.geometry.t_star * default_direction(I).values)
                                        : Vec(1e-2 * rho * sphere_directions(I, 1, cfg.seed).front());
  run.step1 = minimize_in_ball(I, rho, start, cfg.solver);
  run.h1 = I.norm(run.step1->u);
  run.timings["step1"] = sw.lap();
  log("step 1: level %.10g, residual %.3g, %d iterations", run.step1->level, run.step1->residual,
      run.step1->iters);

  try {
    run.step2 = mountain_pass(I, run.geometry.scan->e.values, cfg.solver, run.geometry.sphere.eta);
    run.h2 = I.norm(run.step2->point.u);
    log("step 2: level %.10g, residual %.3g, %d iterations", run.step2->point.level, run.step2->point.residual,
        run.step2->point.iters);
  } catch (const PathCollapseError& err) {
    run.failure = err.what();
    log("step 2: %s", err.what());
  } catch (const NumericalError& err) {
    run.failure = err.what();
    log("step 2: %s", err.what());
  }
  run.timings["step2"] = sw.lap();

  if (run.step2) run.distinct = verify_distinct(I, *run.step1, run.step2->point, cfg.solver);
  return run;
}

}  // namespace

RunOutcome cmd_check(const RunConfig& cfg) {
  Stopwatch sw;
  RunOutcome out;
  out.report = base_report("check", cfg);
  const ProblemSpec shifted = shift_problem(cfg.problem);
  out.report["shift"] = shift_json(shifted);
  Hypotheses h = run_checks(requested_checks(cfg), cfg.problem, shifted);
  out.report["hypotheses"] = h.json;

  bool any_fail = false;
  bool any_open = false;
  for (const ConditionReport& r : h.reports) {
    any_fail = any_fail || r.verdict == Verdict::fail;
    any_open = any_open || r.verdict == Verdict::inconclusive;
  }
  out.exit_code = any_fail ? exit_check_failed : any_open ? exit_inconclusive : exit_ok;
  finish(out, cfg, {{"checks", sw.lap()}});
  return out;
}

RunOutcome cmd_geometry(const RunConfig& cfg) {
  Stopwatch sw;
  RunOutcome out;
  out.report = base_report("geometry", cfg);
  const ProblemSpec shifted = shift_problem(cfg.problem);
  out.report["shift"] = shift_json(shifted);
  Hypotheses h = run_checks(cfg.checks, cfg.problem, shifted);
  if (!cfg.checks.empty()) out.report["hypotheses"] = h.json;
  Json timings = {{"checks", sw.lap()}};

  const RadialGrid grid = build_grid(cfg.problem.R, cfg.problem.n, cfg.problem.scheme);
  const KirchhoffFunctional I(shifted, grid);
  const GeometryReport geo = certify_geometry(I, cfg.geometry, h.constants);
  timings["geometry"] = sw.lap();
  log("geometry: rho %.6g (%s), eta %.6g, %s", geo.sphere.rho, geo.rho_source.c_str(), geo.sphere.eta,
      geo.holds ? "holds" : geo.failure.c_str());
  out.report["geometry"] = to_json(geo);
  out.exit_code = geo.holds ? exit_ok : exit_geometry;
  finish(out, cfg, std::move(timings));
  return out;
}

RunOutcome cmd_solve(const RunConfig& cfg) {
  Stopwatch sw;
  RunOutcome out;
  out.report = base_report("solve", cfg);
  const ProblemSpec shifted = shift_problem(cfg.problem);
  out.report["shift"] = shift_json(shifted);
  Hypotheses h = run_checks(cfg.checks, cfg.problem, shifted);
  if (!cfg.checks.empty()) out.report["hypotheses"] = h.json;
  Json timings = {{"checks", sw.lap()}};

  const RadialGrid grid = build_grid(cfg.problem.R, cfg.problem.n, cfg.problem.scheme);
  const KirchhoffFunctional I(shifted, grid);
  SolveRun run = solve_on(I, cfg, h.constants);
  sw.lap();
  for (const auto& [k, v] : run.timings.items()) timings[k] = v;
  out.report["geometry"] = to_json(run.geometry);
  log("geometry: rho %.6g (%s), eta %.6g, %s", run.geometry.sphere.rho, run.geometry.rho_source.c_str(),
      run.geometry.sphere.eta, run.geometry.holds ? "holds" : run.geometry.failure.c_str());

  if (!run.geometry.holds) {
    out.exit_code = exit_geometry;
    finish(out, cfg, std::move(timings));
    return out;
  }

  const fs::path dir(cfg.output_dir);
  const auto nodes = grid.nodes();
  auto save = [&](const std::string& name, const std::string& text) {
    write_atomic(dir / name, text);
    out.files.push_back((dir / name).string());
  };

  out.report["step1"] = to_json(*run.step1, run.h1);
  out.report["step1"]["solution_csv"] = "step1.csv";
  out.report["step1"]["trace_csv"] = "step1_trace.csv";
  save("step1.csv", solution_csv(nodes, {run.step1->u.data(), static_cast<std::size_t>(run.step1->u.size())}));
  save("step1_trace.csv", trace_csv(run.step1->trace));

  if (run.step2) {
    const MountainPassResult& mp = *run.step2;
    Json s2 = to_json(mp.point, run.h2);
    s2["path"] = {{"points", mp.path.points.size()},
                  {"max_index", mp.path.max_index},
                  {"monotonicity_violations", mp.monotonicity_violations},
                  {"reparametrisations", mp.reparametrisations},
                  {"rejected_reparametrisations", mp.rejected_reparametrisations}};
    s2["solution_csv"] = "step2.csv";
    s2["trace_csv"] = "step2_trace.csv";
    out.report["step2"] = s2;
    save("step2.csv", solution_csv(nodes, {mp.point.u.data(), static_cast<std::size_t>(mp.point.u.size())}));
    save("step2_trace.csv", trace_csv(mp.point.trace));
  } else {
    out.report["step2"] = {{"kind", "mountain-pass"}, {"converged", false}, {"note", run.failure}};
  }

  if (run.distinct) {
    out.report["distinctness"] = to_json(*run.distinct);
    log("distinctness: %s (H-distance %.6g)%s%s", run.distinct->pass ? "pass" : "fail", run.distinct->distance,
        run.distinct->reason.empty() ? "" : ", ", run.distinct->reason.c_str());
  } else {
    out.report["distinctness"] = {{"pass", false}, {"reason", "mountain pass failed: " + run.failure}};
  }

  if (cfg.truncation_check && run.distinct && run.distinct->pass) {
    ProblemSpec wide = shifted;
    wide.R = 1.5 * cfg.problem.R;
    wide.n = static_cast<int>(std::lround(1.5 * cfg.problem.n));
    const RadialGrid g2 = build_grid(wide.R, wide.n, wide.scheme);
    const KirchhoffFunctional I2(wide, g2);
    const SolveRun again = solve_on(I2, cfg, h.constants);
    Json t = {{"R", number(wide.R)}, {"n", wide.n}};
    if (again.step1 && again.step2) {
      const double l1 = again.step1->level;
      const double l2 = again.step2->point.level;
      t["step1_level"] = number(l1);
      t["step2_level"] = number(l2);
      t["step1_rel_change"] = number(std::abs(l1 - run.step1->level) / std::max(1e-300, std::abs(run.step1->level)));
      t["step2_rel_change"] =
          number(std::abs(l2 - run.step2->point.level) / std::max(1e-300, std::abs(run.step2->point.level)));
    } else {
      t["failure"] = again.geometry.holds ? again.failure : again.geometry.failure;
    }
    out.report["truncation"] = t;
    timings["truncation"] = sw.lap();
  }

  const bool converged = run.step1->converged && run.step2 && run.step2->point.converged;
  if (run.distinct && run.distinct->pass)
    out.exit_code = exit_ok;
  else if (!converged)
    out.exit_code = exit_nonconvergence;
  else
    out.exit_code = exit_check_failed;
  finish(out, cfg, std::move(timings));
  return out;
}

}  // namespace kirchhoff
