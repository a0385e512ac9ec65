#include "kirchhoff/report.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

Json named(const Named& values) {
  Json out = Json::object();
  for (const auto& [k, v] : values) out[k] = number(v);
  return out;
}

Json point(const Point& x) { return Json::array({number(x[0]), number(x[1]), number(x[2])}); }

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const ConditionReport& rep) {
  Json j;
  j["condition"] = rep.condition;
  j["pass"] = to_string(rep.verdict);
  j["margin"] = number(rep.margin);
  j["fitted"] = named(rep.fitted);
  j["samples"] = rep.samples;
  Json subs = Json::array();
  for (const SubCheck& s : rep.subchecks)
    subs.push_back({{"name", s.name}, {"verdict", to_string(s.verdict)}, {"margin", number(s.margin)}, {"note", s.note}});
  j["subchecks"] = subs;
  Json ces = Json::array();
  for (const Counterexample& c : rep.counterexamples)
    ces.push_back({{"x", point(c.x)}, {"u", number(c.u)}, {"slack", number(c.slack)}, {"values", named(c.values)}});
  j["counterexamples"] = ces;
  j["warnings"] = rep.warnings;
  return j;
}

Json to_json(const GeometryReport& rep) {
  Json j;
  j["holds"] = rep.holds;
  j["rho"] = number(rep.sphere.rho);
  j["rho_source"] = rep.rho_source;
  j["eta"] = number(rep.sphere.eta);
  j["sphere"] = {{"samples", rep.sphere.samples},
                 {"seed", rep.sphere.seed},
                 {"sampled_min", number(rep.sphere.sampled_min)},
                 {"refined_min", number(rep.sphere.refined_min)},
                 {"analytic_bound", rep.sphere.analytic_bound ? number(*rep.sphere.analytic_bound) : Json(nullptr)}};
  if (rep.scan) {
    const NegativeScan& s = *rep.scan;
    j["negative_point"] = {{"t", number(s.t)},
                           {"level", number(s.level)},
                           {"norm", number(s.norm)},
                           {"trend_decreasing", s.trend_decreasing},
                           {"scan_t", numbers(s.ts)},
                           {"scan_level", numbers(s.levels)},
                           {"scan_quartic_ratio", numbers(s.quartic_ratio)}};
  } else {
    j["negative_point"] = nullptr;
  }
  j["t_star"] = rep.t_star ? number(*rep.t_star) : Json(nullptr);
  j["warnings"] = rep.warnings;
  j["failure"] = rep.failure;
  return j;
}

Json to_json(const CriticalPoint& cp, double h_norm) {
  Json j;
  j["kind"] = to_string(cp.kind);
  j["level"] = number(cp.level);
  j["residual"] = number(cp.residual);
  j["cerami"] = number(cp.cerami);
  j["h_norm"] = number(h_norm);
  j["iterations"] = cp.iters;
  j["converged"] = cp.converged;
  j["degenerate"] = cp.degenerate;
  j["on_boundary"] = cp.on_boundary;
  j["note"] = cp.note;
  return j;
}

Json to_json(const DistinctReport& rep) {
  return {{"pass", rep.pass},
          {"level1", number(rep.level1)},
          {"level2", number(rep.level2)},
          {"distance", number(rep.distance)},
          {"reason", rep.reason}};
}

Json versions() {
  Json j;
  j["kirchhoff"] = "0.1.0";
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
               std::to_string(BOOST_VERSION % 100);
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#if defined(__clang__)
  j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  j["compiler"] = std::string("gcc ") + __VERSION__;
#else
  j["compiler"] = "unknown";
#endif
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string solution_csv(std::span<const double> r, std::span<const double> u) {
  if (r.size() != u.size()) throw DimensionError("solution csv: radii and values differ in length");
  std::string out = "r,u\n";
  for (std::size_t i = 0; i < r.size(); ++i) out += format_double(r[i]) + "," + format_double(u[i]) + "\n";
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iter,level,residual,cerami\n";
  for (const TraceRow& t : trace)
    out += std::to_string(t.iter) + "," + format_double(t.level) + "," + format_double(t.residual) + "," +
           format_double(t.cerami) + "\n";
  return out;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

Json strip_timings(const Json& report) {
  Json j = report;
  if (j.is_object()) j.erase("timings");
  return j;
}

}  // namespace kirchhoff
