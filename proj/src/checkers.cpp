#include "kirchhoff/checkers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/kernels.hpp"

namespace kirchhoff {

namespace {

constexpr std::size_t kMaxCounterexamples = 10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent grids: exact decimals (k / 100) so that q = 5 is hit exactly.
std::vector<double> exponent_grid(int lo_hundredths, int hi_hundredths) {
  std::vector<double> out;
  for (int k = lo_hundredths; k <= hi_hundredths; k += 5) out.push_back(k / 100.0);
  return out;
}

std::vector<double> log_points(double lo, double hi, int intervals) {
  std::vector<double> out(intervals + 1);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int j = 0; j <= intervals; ++j) out[j] = std::exp(a + (b - a) * j / intervals);
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Values fn(x_i, u_j) in x-major order.
std::vector<double> lattice(const std::vector<Point>& xs, const std::vector<double>& us,
                            const std::function<double(const Point&, double)>& fn) {
  const std::size_t nu = us.size();
  return map_indexed(xs.size() * nu, [&](std::size_t k) { return fn(xs[k / nu], us[k % nu]); });
}

// Up to ten most negative slacks, ties by lattice order.
std::vector<std::size_t> worst(const std::vector<double>& slack) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < slack.size(); ++k)
    if (slack[k] < 0.0) idx.push_back(k);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return slack[a] < slack[b]; });
  if (idx.size() > kMaxCounterexamples) idx.resize(kMaxCounterexamples);
  return idx;
}

double min_of(const std::vector<double>& v) {
  double m = kInf;
  for (double x : v) m = std::min(m, x);
  return m;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::pass && b == Verdict::pass) return Verdict::pass;
  return Verdict::inconclusive;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SignRange parse_sign_range(std::string_view name) {
  if (name == "full") return SignRange::full;
  if (name == "nonnegative") return SignRange::nonnegative;
  throw ConfigError("unknown sign range '" + std::string(name) + "'");
}

std::string to_string(SignRange r) { return r == SignRange::full ? "full" : "nonnegative"; }

std::vector<Point> SampleSpec::default_x() {
  std::vector<Point> xs;
  for (int k = 0; k <= 16; ++k) {
    const double s = -std::numbers::pi + 2.0 * std::numbers::pi * k / 16.0;
    xs.push_back({s, 0.0, 0.0});
  }
  return xs;
}

std::vector<double> SampleSpec::magnitudes() const {
  if (!(U > 0.0) || !(u_min > 0.0) || !(u_min < U) || intervals < 1)
    throw ConfigError("u sampling needs 0 < u_min < U and at least one interval");
  std::vector<double> m = log_points(u_min, U, intervals);
  for (int j = 1; j <= intervals; ++j) m.push_back(U * j / intervals);
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

std::vector<double> SampleSpec::extension_magnitudes() const {
  if (!(extension > 1.0)) return {};
  std::vector<double> m = log_points(U, extension * U, std::max(1, intervals / 10));
  m.erase(m.begin());
  return m;
}

std::vector<double> SampleSpec::signed_values(const std::vector<double>& mags) const {
  std::vector<double> out;
  out.reserve(2 * mags.size());
  if (range == SignRange::full)
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) out.push_back(-*it);
  for (double m : mags) out.push_back(m);
  return out;
}

std::string SampleSpec::describe() const {
  const std::size_t nu = magnitudes().size() * (range == SignRange::full ? 2 : 1);
  return std::to_string(nu) + " u-values with |u| in [" + fmt(u_min) + ", " + fmt(U) +
         "] (log + linear, " + std::to_string(intervals) + " intervals each, " + to_string(range) +
         " sign range), growth probe to |u| = " + fmt(extension * U) + "; " +
         std::to_string(x.size()) + " x-samples";
}

std::optional<double> ConditionReport::get(std::string_view key) const {
  for (const auto& [k, v] : fitted)
    if (k == key) return v;
  return std::nullopt;
}

ConditionReport check_V1(const Potential& potential, const V1Options& opts) {
  if (!(opts.d0 > 0.0)) throw ConfigError("V1 needs d0 > 0");
  if (opts.y_radii.size() < 3) throw ConfigError("V1 needs at least three |y| values");
  if (opts.samples == 0) throw ConfigError("V1 needs Monte-Carlo samples");

  ConditionReport rep;
  rep.condition = "V1";
  rep.samples = std::to_string(opts.samples) + " uniform points in B_d0(y), common random numbers, seed " +
                std::to_string(opts.seed);
  rep.fitted.emplace_back("d0", opts.d0);
  const double vol = 4.0 / 3.0 * std::numbers::pi * std::pow(opts.d0, 3);
  const double n = static_cast<double>(opts.samples);

  std::vector<double> radii = opts.y_radii;
  std::sort(radii.begin(), radii.end());
  const std::size_t tail = radii.size() - 3;

  rep.verdict = Verdict::pass;
  rep.margin = kInf;
  for (double level : opts.levels) {
    std::vector<double> est;
    std::vector<double> frac;
    for (double y : radii) {
      const std::uint64_t hits =
          count_sublevel(potential, Point{y, 0.0, 0.0}, opts.d0, level, opts.samples, opts.seed);
      const double p = static_cast<double>(hits) / n;
      frac.push_back(p);
      est.push_back(p * vol);
      rep.fitted.emplace_back("meas[M=" + fmt(level) + ",|y|=" + fmt(y) + "]", p * vol);
    }
    const bool all_zero = std::all_of(est.begin() + tail, est.end(), [](double e) { return e == 0.0; });
    if (all_zero) {
      rep.margin = std::min(rep.margin, 0.0);
      continue;
    }
    for (std::size_t k = tail; k + 1 < radii.size(); ++k) {
      const double p = std::max(frac[k], frac[k + 1]);
      const double band = std::sqrt(p * (1.0 - p) / n) * vol * 3.0;
      const double diff = est[k] - est[k + 1];
      const double slack = diff - band;
      rep.margin = std::min(rep.margin, slack);
      Verdict v = Verdict::pass;
      if (diff <= -band)
        v = Verdict::fail;
      else if (!(diff > band))
        v = Verdict::inconclusive;
      if (v != Verdict::pass) {
        Counterexample ce;
        ce.x = {radii[k + 1], 0.0, 0.0};
        ce.u = 0.0;
        ce.slack = slack;
        ce.values = {{"M", level}, {"|y|_inner", radii[k]}, {"|y|_outer", radii[k + 1]},
                     {"meas_inner", est[k]}, {"meas_outer", est[k + 1]}, {"band", band}};
        if (rep.counterexamples.size() < kMaxCounterexamples) rep.counterexamples.push_back(ce);
      }
      rep.verdict = combine(rep.verdict, v);
    }
  }
  if (rep.margin == kInf) rep.margin = 0.0;
  return rep;
}

ConditionReport check_S1(const Nonlinearity& f, const SampleSpec& samples, double r0) {
  ConditionReport rep;
  rep.condition = "S1";
  rep.samples = samples.describe();
  const std::vector<double> us = samples.signed_values(samples.magnitudes());
  const std::vector<double> ue = samples.signed_values(samples.extension_magnitudes());
  const std::vector<double> af = lattice(samples.x, us, [&](const Point& x, double u) { return std::abs(f.f(x, u)); });
  const std::vector<double> ae = lattice(samples.x, ue, [&](const Point& x, double u) { return std::abs(f.f(x, u)); });
  const std::size_t nu = us.size();
  const std::size_t ne = ue.size();

  // c1 from the small-|u| samples.
  double c1 = 0.0;
  double ratio_small = 0.0;  // at the smallest |u|
  double ratio_r0 = 0.0;     // at the largest |u| <= r0
  double a_small = kInf;
  double a_r0 = 0.0;
  for (std::size_t k = 0; k < af.size(); ++k) {
    const double a = std::abs(us[k % nu]);
    if (a > r0) continue;
    const double r = af[k] / (a * a * a);
    c1 = std::max(c1, r);
    if (a < a_small) {
      a_small = a;
      ratio_small = r;
    } else if (a == a_small) {
      ratio_small = std::max(ratio_small, r);
    }
    if (a > a_r0) {
      a_r0 = a;
      ratio_r0 = r;
    } else if (a == a_r0) {
      ratio_r0 = std::max(ratio_r0, r);
    }
  }
  if (ratio_small > 10.0 * ratio_r0 && ratio_small > 0.0)
    rep.warnings.push_back("|f|/|u|^3 grows by a factor " + fmt(ratio_small / std::max(ratio_r0, 1e-300)) +
                           " between |u| = " + fmt(a_r0) + " and |u| = " + fmt(a_small) +
                           "; c1 is set by the smallest sample and is unbounded as |u| -> 0");

  // Smallest q whose ratio |f|/|u|^(q-1) stays below its fitting-range sup
  // on the growth probe.
  std::optional<double> q;
  for (double qq : exponent_grid(405, 595)) {
    double fit_sup = 0.0;
    for (std::size_t k = 0; k < af.size(); ++k) {
      const double a = std::abs(us[k % nu]);
      if (a >= r0) fit_sup = std::max(fit_sup, af[k] / std::pow(a, qq - 1.0));
    }
    double ext_sup = 0.0;
    for (std::size_t k = 0; k < ae.size(); ++k)
      ext_sup = std::max(ext_sup, ae[k] / std::pow(std::abs(ue[k % ne]), qq - 1.0));
    if (ext_sup <= fit_sup * (1.0 + 1e-12)) {
      q = qq;
      break;
    }
  }
  const double qv = q.value_or(5.95);

  double c2 = 0.0;
  for (std::size_t k = 0; k < af.size(); ++k) {
    const double a = std::abs(us[k % nu]);
    if (a >= r0) c2 = std::max(c2, (af[k] - c1 * a * a * a) / std::pow(a, qv - 1.0));
  }
  c1 *= 1.0 + 1e-12;
  c2 *= 1.0 + 1e-12;

  auto slack_of = [&](double a, double val) { return c1 * a * a * a + c2 * std::pow(a, qv - 1.0) - val; };
  std::vector<double> slack(af.size() + ae.size());
  for (std::size_t k = 0; k < af.size(); ++k) slack[k] = slack_of(std::abs(us[k % nu]), af[k]);
  for (std::size_t k = 0; k < ae.size(); ++k) slack[af.size() + k] = slack_of(std::abs(ue[k % ne]), ae[k]);
  rep.margin = min_of(slack);
  for (std::size_t k : worst(slack)) {
    const bool ext = k >= af.size();
    const std::size_t j = ext ? k - af.size() : k;
    const std::size_t n = ext ? ne : nu;
    Counterexample ce;
    ce.x = samples.x[j / n];
    ce.u = ext ? ue[j % n] : us[j % n];
    ce.slack = slack[k];
    ce.values = {{"|f|", ext ? ae[j] : af[j]}, {"bound", slack[k] + (ext ? ae[j] : af[j])}};
    rep.counterexamples.push_back(ce);
  }

  rep.fitted = {{"c1", c1}, {"c2", c2}, {"q", qv}};
  if (!q) rep.warnings.push_back("no q < 6 on the grid keeps |f|/|u|^(q-1) bounded on the growth probe");
  rep.verdict = (q && rep.margin >= 0.0 && std::isfinite(c1) && std::isfinite(c2)) ? Verdict::pass : Verdict::fail;
  return rep;
}

ConditionReport check_S2(const Nonlinearity& f, const SampleSpec& samples, const S2Options& opts) {
  ConditionReport rep;
  rep.condition = "S2";
  rep.samples = samples.describe() + "; divergence probe at |u| = 10, 100, 1000";

  // (a) worst |F|/u^4 over x and admissible signs.
  SubCheck a{"divergence", Verdict::pass, 0.0, ""};
  std::vector<double> ratios;
  for (double m : {10.0, 100.0, 1000.0}) {
    double r = kInf;
    for (const Point& x : samples.x)
      for (double u : samples.signed_values({m})) r = std::min(r, std::abs(f.F(x, u)) / std::pow(m, 4));
    ratios.push_back(r);
    rep.fitted.emplace_back("ratio@" + fmt(m), r);
  }
  const bool increasing = ratios[1] > ratios[0] && ratios[2] > ratios[1];
  const double growth = ratios[0] > 0.0 ? ratios[2] / ratios[0] : (ratios[2] > 0.0 ? kInf : 0.0);
  // Log-excess over the threshold, or the worst step when not increasing.
  a.margin = increasing ? (std::isfinite(growth) ? std::log(growth / opts.divergence_factor)
                                                 : std::numeric_limits<double>::max())
                        : std::min(ratios[1] - ratios[0], ratios[2] - ratios[1]);
  if (!increasing) {
    a.verdict = Verdict::fail;
    a.note = "|F|/u^4 is not increasing over |u| = 10, 100, 1000";
  } else if (growth < opts.divergence_factor) {
    a.verdict = Verdict::inconclusive;
    a.note = "|F|/u^4 increases by " + fmt(growth) + "x, below the divergence threshold " +
             fmt(opts.divergence_factor) + "x";
  }
  if (a.verdict == Verdict::fail) {
    Counterexample ce;
    ce.x = samples.x.front();
    ce.u = 1000.0;
    ce.slack = a.margin;
    ce.values = {{"ratio@10", ratios[0]}, {"ratio@100", ratios[1]}, {"ratio@1000", ratios[2]}};
    rep.counterexamples.push_back(ce);
  }

  // (b) inf_x F(x, u) >= c3 |u|^tau for |u| >= r0, with r0 raised until F >= 0.
  SubCheck b{"lower-bound", Verdict::pass, 0.0, ""};
  const std::vector<double> us = samples.signed_values(samples.magnitudes());
  const std::vector<double> Fv = lattice(samples.x, us, [&](const Point& x, double u) { return f.F(x, u); });
  const std::size_t nu = us.size();
  std::vector<double> g(nu, kInf);
  std::vector<std::size_t> gx(nu, 0);
  for (std::size_t k = 0; k < Fv.size(); ++k)
    if (Fv[k] < g[k % nu]) {
      g[k % nu] = Fv[k];
      gx[k % nu] = k / nu;
    }

  std::optional<double> r_fit;
  for (int k = 0;; ++k) {
    const double r = opts.r0 * (1.0 + 0.1 * k);
    if (r > 0.5 * samples.U || (opts.r0 == 0.0 && k > 0)) break;
    bool ok = true;
    for (std::size_t j = 0; j < nu && ok; ++j)
      if (std::abs(us[j]) >= r && g[j] < 0.0) ok = false;
    if (ok) {
      r_fit = r;
      break;
    }
  }

  if (!r_fit) {
    b.verdict = Verdict::fail;
    b.note = "inf_x F(x, u) < 0 for arbitrarily large sampled |u|";
    std::vector<double> slack(nu, 0.0);
    for (std::size_t j = 0; j < nu; ++j) slack[j] = std::abs(us[j]) >= opts.r0 ? g[j] : 0.0;
    b.margin = min_of(slack);
    for (std::size_t j : worst(slack)) {
      Counterexample ce;
      ce.x = samples.x[gx[j]];
      ce.u = us[j];
      ce.slack = slack[j];
      ce.values = {{"F", g[j]}};
      rep.counterexamples.push_back(ce);
    }
    rep.fitted.emplace_back("r0", opts.r0);
  } else {
    double best_c3 = -kInf;
    double best_tau = 0.0;
    for (double tau : exponent_grid(5, 195)) {
      double c3 = kInf;
      for (std::size_t j = 0; j < nu; ++j) {
        const double a = std::abs(us[j]);
        if (a >= *r_fit) c3 = std::min(c3, g[j] / std::pow(a, tau));
      }
      if (c3 > best_c3) {
        best_c3 = c3;
        best_tau = tau;
      }
    }
    best_c3 = std::max(0.0, best_c3 * (1.0 - 1e-12));
    double m = kInf;
    for (std::size_t j = 0; j < nu; ++j) {
      const double a = std::abs(us[j]);
      if (a >= *r_fit) m = std::min(m, g[j] - best_c3 * std::pow(a, best_tau));
    }
    b.margin = m;
    rep.fitted.emplace_back("c3", best_c3);
    rep.fitted.emplace_back("tau", best_tau);
    rep.fitted.emplace_back("r0", *r_fit);
    if (*r_fit > opts.r0)
      rep.warnings.push_back("r0 raised from " + fmt(opts.r0) + " to " + fmt(*r_fit) +
                             " to keep inf_x F >= 0");
    if (best_c3 == 0.0) rep.warnings.push_back("fitted c3 = 0");
    if (m < 0.0) b.verdict = Verdict::fail;
  }

  rep.subchecks = {a, b};
  rep.verdict = combine(a.verdict, b.verdict);
  rep.margin = std::min(a.margin, b.margin);
  return rep;
}

ConditionReport check_S3(const Nonlinearity& f, const SampleSpec& samples, double r0) {
  ConditionReport rep;
  rep.condition = "S3";
  rep.samples = samples.describe();
  const std::vector<double> us = samples.signed_values(samples.magnitudes());
  const std::vector<double> ue = samples.signed_values(samples.extension_magnitudes());
  const std::size_t nu = us.size();
  const std::size_t ne = ue.size();

  struct Q {
    double F, script;
    bool zero;  // script F within roundoff of 0
  };
  auto eval = [&](const std::vector<double>& u_set) {
    const std::size_t n = u_set.size();
    std::vector<Q> out(samples.x.size() * n);
    map_indexed(out.size(), [&](std::size_t k) {
      const Point& x = samples.x[k / n];
      const double u = u_set[k % n];
      const double F = f.F(x, u);
      const double quarter = 0.25 * u * f.f(x, u);
      const double s = quarter - F;
      out[k] = {F, s, std::abs(s) <= 1e-12 * (std::abs(quarter) + std::abs(F))};
      return 0.0;
    });
    return out;
  };
  const std::vector<Q> qf = eval(us);
  const std::vector<Q> qe = eval(ue);

  // (a) script F >= 0.
  SubCheck a{"nonnegativity", Verdict::pass, 0.0, ""};
  std::vector<double> slack_a(qf.size());
  for (std::size_t k = 0; k < qf.size(); ++k) slack_a[k] = qf[k].zero ? 0.0 : qf[k].script;
  a.margin = min_of(slack_a);
  if (a.margin < 0.0) {
    a.verdict = Verdict::fail;
    a.note = "u f/4 - F < 0 on the sample";
    for (std::size_t k : worst(slack_a)) {
      Counterexample ce;
      ce.x = samples.x[k / nu];
      ce.u = us[k % nu];
      ce.slack = slack_a[k];
      ce.values = {{"F", qf[k].F}, {"scriptF", qf[k].script}};
      rep.counterexamples.push_back(ce);
    }
  }

  // (b) |F|^kappa <= c4 |u|^(2 kappa) scriptF for |u| >= r0, in logs.
  SubCheck b{"kappa-bound", Verdict::pass, 0.0, ""};
  std::size_t relevant = 0;
  std::size_t degenerate = 0;
  std::vector<double> slack_deg;
  std::vector<std::size_t> deg_idx;
  auto scan_degenerate = [&](const std::vector<Q>& qs, const std::vector<double>& u_set, bool ext) {
    const std::size_t n = u_set.size();
    for (std::size_t k = 0; k < qs.size(); ++k) {
      if (std::abs(u_set[k % n]) < r0 || qs[k].F == 0.0) continue;
      ++relevant;
      if (qs[k].zero || qs[k].script < 0.0) {
        ++degenerate;
        slack_deg.push_back(-std::abs(qs[k].F));
        deg_idx.push_back(ext ? qf.size() + k : k);
      }
    }
  };
  scan_degenerate(qf, us, false);
  scan_degenerate(qe, ue, true);

  auto log_ratio = [&](const Q& q, double u, double kappa) {
    return kappa * std::log(std::abs(q.F)) - 2.0 * kappa * std::log(std::abs(u)) - std::log(q.script);
  };
  auto usable = [&](const Q& q, double u) {
    return std::abs(u) >= r0 && q.F != 0.0 && !q.zero && q.script > 0.0;
  };

  std::optional<double> kappa;
  double log_c4 = 0.0;
  if (degenerate > 0) {
    b.verdict = Verdict::fail;
    b.note = degenerate == relevant ? "u f/4 - F vanishes wherever F != 0; no kappa is attainable"
                                    : "u f/4 - F vanishes or is negative where F != 0";
    b.margin = min_of(slack_deg);
    std::vector<std::size_t> order(slack_deg.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return slack_deg[i] < slack_deg[j]; });
    for (std::size_t o = 0; o < order.size() && rep.counterexamples.size() < kMaxCounterexamples; ++o) {
      const std::size_t k = deg_idx[order[o]];
      const bool ext = k >= qf.size();
      const std::size_t j = ext ? k - qf.size() : k;
      const std::size_t n = ext ? ne : nu;
      const Q& q = ext ? qe[j] : qf[j];
      Counterexample ce;
      ce.x = samples.x[j / n];
      ce.u = ext ? ue[j % n] : us[j % n];
      ce.slack = slack_deg[order[o]];
      ce.values = {{"F", q.F}, {"scriptF", q.script}};
      rep.counterexamples.push_back(ce);
    }
  } else {
    // Largest kappa whose ratio stays below its fitting-range sup on the
    // growth probe.
    const std::vector<double> grid = exponent_grid(105, 300);
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      double fit_sup = -kInf;
      for (std::size_t k = 0; k < qf.size(); ++k)
        if (usable(qf[k], us[k % nu])) fit_sup = std::max(fit_sup, log_ratio(qf[k], us[k % nu], *it));
      double ext_sup = -kInf;
      for (std::size_t k = 0; k < qe.size(); ++k)
        if (usable(qe[k], ue[k % ne])) ext_sup = std::max(ext_sup, log_ratio(qe[k], ue[k % ne], *it));
      if (fit_sup == -kInf) break;
      if (ext_sup <= fit_sup + 1e-12) {
        kappa = *it;
        log_c4 = fit_sup + 1e-12;
        break;
      }
    }
    if (!kappa) {
      b.verdict = Verdict::fail;
      b.note = "|F|^kappa / (|u|^(2 kappa) scriptF) grows on the probe for every kappa in (1, 3]";
      const double k0 = 1.05;
      double fit_sup = -kInf;
      for (std::size_t k = 0; k < qf.size(); ++k)
        if (usable(qf[k], us[k % nu])) fit_sup = std::max(fit_sup, log_ratio(qf[k], us[k % nu], k0));
      std::vector<double> slack(qe.size(), 0.0);
      for (std::size_t k = 0; k < qe.size(); ++k)
        if (usable(qe[k], ue[k % ne])) slack[k] = fit_sup - log_ratio(qe[k], ue[k % ne], k0);
      b.margin = min_of(slack);
      for (std::size_t k : worst(slack)) {
        Counterexample ce;
        ce.x = samples.x[k / ne];
        ce.u = ue[k % ne];
        ce.slack = slack[k];
        ce.values = {{"F", qe[k].F}, {"scriptF", qe[k].script}, {"kappa", k0}};
        rep.counterexamples.push_back(ce);
      }
    } else {
      double m = kInf;
      for (std::size_t k = 0; k < qf.size(); ++k)
        if (usable(qf[k], us[k % nu])) m = std::min(m, log_c4 - log_ratio(qf[k], us[k % nu], *kappa));
      for (std::size_t k = 0; k < qe.size(); ++k)
        if (usable(qe[k], ue[k % ne])) m = std::min(m, log_c4 - log_ratio(qe[k], ue[k % ne], *kappa));
      b.margin = m == kInf ? 0.0 : m;
      rep.fitted = {{"c4", std::exp(log_c4)}, {"kappa", *kappa}, {"r0", r0}};
    }
  }
  if (!kappa) rep.fitted = {{"r0", r0}};

  rep.subchecks = {a, b};
  rep.margin = std::min(a.margin, b.margin);
  if (a.verdict == Verdict::fail)
    rep.verdict = Verdict::fail;
  else if (b.verdict == Verdict::fail && degenerate > 0 && degenerate == relevant)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = b.verdict;
  return rep;
}

std::vector<double> default_mu_grid() { return {4.25, 4.5, 4.75, 5.0, 5.5, 6.0, 7.0, 8.0}; }

ConditionReport check_AR(const Nonlinearity& f, const SampleSpec& samples, const std::vector<double>& mu_grid) {
  for (double mu : mu_grid)
    if (!(mu > 4.0)) throw ConfigError("AR exponents must exceed 4");
  if (mu_grid.empty()) throw ConfigError("AR needs at least one exponent");

  ConditionReport rep;
  rep.condition = "AR";
  rep.samples = samples.describe();
  const std::vector<double> us = samples.signed_values(samples.magnitudes());
  const std::size_t nu = us.size();
  const std::vector<double> Fv = lattice(samples.x, us, [&](const Point& x, double u) { return f.F(x, u); });
  const std::vector<double> uf = lattice(samples.x, us, [&](const Point& x, double u) { return u * f.f(x, u); });

  auto slacks = [&](double mu) {
    std::vector<double> s(Fv.size());
    for (std::size_t k = 0; k < Fv.size(); ++k) {
      const double muF = mu * Fv[k];
      const double upper = uf[k] - muF + 1e-12 * (std::abs(uf[k]) + std::abs(muF));
      // F = 0 violates the strict inequality; it gets the smallest negative slack.
      const double lower = muF > 0.0 ? muF : (muF == 0.0 ? -std::numeric_limits<double>::denorm_min() : muF);
      s[k] = std::min(lower, upper);
    }
    return s;
  };

  std::optional<double> passing;
  double best_mu = mu_grid.front();
  double best_margin = -kInf;
  for (double mu : mu_grid) {
    const double m = min_of(slacks(mu));
    if (m >= 0.0) passing = mu;
    if (m > best_margin) {
      best_margin = m;
      best_mu = mu;
    }
  }
  const double mu = passing.value_or(best_mu);
  const std::vector<double> s = slacks(mu);
  rep.margin = min_of(s);
  rep.fitted = {{"mu", mu}};
  rep.verdict = passing ? Verdict::pass : Verdict::fail;
  if (!passing)
    for (std::size_t k : worst(s)) {
      Counterexample ce;
      ce.x = samples.x[k / nu];
      ce.u = us[k % nu];
      ce.slack = s[k];
      ce.values = {{"mu", mu}, {"F", Fv[k]}, {"uf", uf[k]}};
      rep.counterexamples.push_back(ce);
    }
  return rep;
}

std::optional<GrowthConstants> growth_constants(const ConditionReport& s1) {
  if (s1.condition != "S1" || s1.verdict != Verdict::pass) return std::nullopt;
  const auto c1 = s1.get("c1");
  const auto c2 = s1.get("c2");
  const auto q = s1.get("q");
  if (!c1 || !c2 || !q) return std::nullopt;
  return GrowthConstants{*c1, *c2, *q};
}

}  // namespace kirchhoff
