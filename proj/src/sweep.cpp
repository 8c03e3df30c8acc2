#include "spdc/sweep.hpp"

#include "spdc/error.hpp"
#include "spdc/hash.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace spdc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TiltConfig with_xi(const TiltConfig& t, double xi) {
  TiltConfig out = t;
  out.xi_deg = xi;
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[k] = lo + (hi - lo) * k / (n - 1);
  return v;
}

std::vector<SweepPoint> evaluate_all(const std::vector<double>& xs, const CrystalConfig& crystal,
                                     const PumpConfig& pump, const GridSpec& grid,
                                     const TiltConfig& tilt) {
  std::vector<std::future<SweepPoint>> futs;
  futs.reserve(xs.size());
  for (double x : xs)
    futs.push_back(std::async(std::launch::async, [&, x] {
      return evaluate_xi(crystal, pump, grid, x, tilt);
    }));
  std::vector<SweepPoint> out;
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

// Golden-section minimum of f on [a, b].
template <class F>
double golden_min(F f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  auto less = [](double x, double y) { return std::isnan(y) || (!std::isnan(x) && x < y); };
  while (b - a > tol) {
    if (less(fc, fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::string diagnostics(const std::vector<SweepPoint>& pts) {
  std::string s;
  for (const auto& p : pts) {
    if (!s.empty()) s += "; ";
    s += "xi=" + format_double(p.xi_deg) + " ";
    s += p.ok ? "r=" + format_double(std::round(p.r * 1000) / 1000) : "failed";
  }
  return s;
}

}  // namespace

SweepPoint evaluate_xi(const CrystalConfig& crystal, const PumpConfig& pump, const GridSpec& grid,
                       double xi_deg, const TiltConfig& tilt_template) {
  SweepPoint p;
  p.xi_deg = xi_deg;
  try {
    const auto g = compute_jsa(crystal, pump, with_xi(tilt_template, xi_deg), grid);
    const auto fit = fit_gaussian(g);
    const auto sch = schmidt_decompose(g);
    const auto m = marginals_unchecked(g);
    p.r = fit.r;
    p.metric = fit.metric;
    p.entropy_bits = sch.entropy_bits;
    p.schmidt_number = sch.schmidt_number;
    p.fwhm_s_nm = m.fwhm_s_nm;
    p.fwhm_i_nm = m.fwhm_i_nm;
    p.regime = classify_regime(fit);
    p.ok = true;
  } catch (const std::exception& e) {
    p.r = p.metric = p.entropy_bits = p.schmidt_number = p.fwhm_s_nm = p.fwhm_i_nm = kNaN;
    p.error = e.what();
  }
  return p;
}

double metric_at(const CrystalConfig& crystal, const PumpConfig& pump, const GridSpec& grid,
                 double xi_deg, const TiltConfig& tilt_template) {
  try {
    return fit_gaussian(compute_jsa(crystal, pump, with_xi(tilt_template, xi_deg), grid)).metric;
  } catch (const Error&) {
    return kNaN;
  }
}

SweepResult sweep_xi(double lo_deg, double hi_deg, int steps, const CrystalConfig& crystal,
                     const PumpConfig& pump, const GridSpec& grid,
                     const TiltConfig& tilt_template) {
  if (steps < 2) throw_config("sweep.steps", "must be >= 2");
  if (!(hi_deg > lo_deg)) throw_config("sweep.xi_max", "sweep range is empty (xi_max <= xi_min)");
  if (!(lo_deg > -90.0 && hi_deg < 90.0)) throw_config("sweep.xi_min", "range must lie within (-90, 90)");
  crystal.validate();
  pump.validate();
  grid.validate();

  SweepResult res;
  res.points = evaluate_all(linspace(lo_deg, hi_deg, steps), crystal, pump, grid, tilt_template);

  std::ptrdiff_t best = -1;
  for (std::size_t k = 0; k < res.points.size(); ++k)
    if (res.points[k].ok && (best < 0 || res.points[k].metric < res.points[best].metric))
      best = static_cast<std::ptrdiff_t>(k);
  if (best < 0) return res;
  const auto& P = res.points;
  const auto last = static_cast<std::ptrdiff_t>(P.size()) - 1;
  res.minimum_interior = best > 0 && best < last && P[best - 1].ok && P[best + 1].ok;
  if (!res.minimum_interior) {
    res.xi_uncorrelated = P[best].xi_deg;
    return res;
  }
  auto f = [&](double x) { return metric_at(crystal, pump, grid, x, tilt_template); };
  const double x = golden_min(f, P[best - 1].xi_deg, P[best + 1].xi_deg, 0.1);
  const double fx = f(x);
  // Keep the sampled node if refinement did not improve on it.
  res.xi_uncorrelated = (!std::isnan(fx) && fx <= P[best].metric) ? x : P[best].xi_deg;
  return res;
}

std::string sweep_csv_text(const SweepResult& s, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += kSweepCsvHeader;
  out += '\n';
  auto num = [](double v) { return std::isnan(v) ? std::string("nan") : format_double(v); };
  for (const auto& p : s.points) {
    out += num(p.xi_deg) + ',' + num(p.r) + ',' + num(p.metric) + ',' + num(p.entropy_bits) + ',' +
           num(p.schmidt_number) + ',' + num(p.fwhm_s_nm) + ',' + num(p.fwhm_i_nm) + '\n';
  }
  return out;
}

const char* to_string(SolveTarget t) noexcept {
  switch (t) {
    case SolveTarget::Uncorrelated: return "uncorrelated";
    case SolveTarget::RValue: return "r-value";
    case SolveTarget::Anticorrelated: return "anticorrelated";
    case SolveTarget::CorrelatedMatched: return "correlated-matched";
  }
  return "?";
}

SolveTarget parse_solve_target(const std::string& s) {
  for (auto t : {SolveTarget::Uncorrelated, SolveTarget::RValue, SolveTarget::Anticorrelated,
                 SolveTarget::CorrelatedMatched})
    if (s == to_string(t)) return t;
  throw_config("solve.target",
               "unknown target '" + s +
                   "' (uncorrelated, r-value, anticorrelated, correlated-matched)");
}

SolveResult solve_xi_for_regime(const SolveRequest& req, const CrystalConfig& crystal,
                                const PumpConfig& pump, const GridSpec& grid,
                                const TiltConfig& tilt_template) {
  if (!(req.lo_deg < req.hi_deg)) throw_config("solve.xi_min", "empty search range");
  if (!(req.lo_deg > -90.0 && req.hi_deg < 90.0))
    throw_config("solve.xi_min", "search range must lie within (-90, 90)");
  if (!(req.tolerance_deg > 0.0)) throw_config("solve.tolerance_deg", "must be > 0");
  if (!(req.prescan_step_deg > 0.0)) throw_config("solve.prescan_step_deg", "must be > 0");
  if (req.target == SolveTarget::RValue && !(std::abs(req.r_target) < 1.0))
    throw_config("solve.r_target", "must lie in (-1, 1)");
  crystal.validate();
  pump.validate();
  grid.validate();

  SolveResult res;
  auto finish = [&](double xi) {
    if (!(xi >= req.lo_deg && xi <= req.hi_deg))
      throw_domain(std::string("target ") + to_string(req.target) + " lies at xi=" +
                   format_double(xi) + " deg, outside the search range");
    res.xi_deg = xi;
    res.at = evaluate_xi(crystal, pump, grid, xi, tilt_template);
    return res;
  };

  if (req.target == SolveTarget::Anticorrelated)
    return finish(xi_for_group_delay_match(crystal, GroupDelayMatch::Antidiagonal, tilt_template));
  if (req.target == SolveTarget::CorrelatedMatched)
    return finish(xi_for_group_delay_match(crystal, GroupDelayMatch::Diagonal, tilt_template));

  const int n = static_cast<int>(std::floor((req.hi_deg - req.lo_deg) / req.prescan_step_deg + 1e-9)) + 1;
  std::vector<double> xs = linspace(req.lo_deg, req.lo_deg + (n - 1) * req.prescan_step_deg, std::max(n, 2));
  res.prescan = evaluate_all(xs, crystal, pump, grid, tilt_template);
  const auto& P = res.prescan;

  if (req.target == SolveTarget::Uncorrelated) {
    std::ptrdiff_t best = -1;
    for (std::size_t k = 0; k < P.size(); ++k)
      if (P[k].ok && (best < 0 || P[k].metric < P[best].metric)) best = static_cast<std::ptrdiff_t>(k);
    if (best < 0) throw_domain("uncorrelated target unattainable: every prescan point failed");
    const double a = P[std::max<std::ptrdiff_t>(best - 1, 0)].xi_deg;
    const double b = P[std::min<std::ptrdiff_t>(best + 1, static_cast<std::ptrdiff_t>(P.size()) - 1)].xi_deg;
    auto f = [&](double x) { return metric_at(crystal, pump, grid, x, tilt_template); };
    double x = golden_min(f, a, b, req.tolerance_deg);
    const double fx = f(x);
    if (std::isnan(fx) || fx > P[best].metric) x = P[best].xi_deg;
    return finish(x);
  }

  // RValue: first bracket (in increasing xi) where r - target changes sign.
  std::ptrdiff_t bracket = -1;
  for (std::size_t k = 0; k + 1 < P.size(); ++k) {
    if (!P[k].ok || !P[k + 1].ok) continue;
    const double g0 = P[k].r - req.r_target, g1 = P[k + 1].r - req.r_target;
    if (g0 == 0.0 || g0 * g1 < 0.0) {
      bracket = static_cast<std::ptrdiff_t>(k);
      break;
    }
  }
  if (bracket < 0)
    throw_domain("r = " + format_double(req.r_target) + " unattainable in [" +
                 format_double(req.lo_deg) + ", " + format_double(req.hi_deg) +
                 "] deg; prescan: " + diagnostics(P));
  double a = P[bracket].xi_deg, b = P[bracket + 1].xi_deg;
  double ga = P[bracket].r - req.r_target;
  if (ga == 0.0) return finish(a);
  while (b - a > req.tolerance_deg) {
    const double m = 0.5 * (a + b);
    const auto pm = evaluate_xi(crystal, pump, grid, m, tilt_template);
    if (!pm.ok) throw_numeric("r bisection failed at xi=" + format_double(m) + ": " + pm.error);
    const double gm = pm.r - req.r_target;
    if (gm == 0.0) return finish(m);
    if (ga * gm < 0.0) {
      b = m;
    } else {
      a = m;
      ga = gm;
    }
  }
  return finish(0.5 * (a + b));
}

}  // namespace spdc
