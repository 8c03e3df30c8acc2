// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 whenever every criterion
// could be evaluated, so a red criterion shows up in the log rather than as a crashed test;
// exit 1 means the harness itself broke.
#include "support.hpp"

#include "spdc/dispersion.hpp"
#include "spdc/error.hpp"
#include "spdc/scan.hpp"
#include "spdc/sweep.hpp"
#include "spdc/tilt.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace spdc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Verdict::require(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) {
    detail += " [x]";
    pass = false;
  }
}

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }
bool within_abs(double v, double target, double tol) { return std::abs(v - target) <= tol; }

const PumpConfig kPump2 = testing::default_pump(2.0);
const GridSpec kGrid{};  // 256 x 256, auto spans

double omega0(double nm) { return Wavelength{nm}.to_frequency().rad_per_fs; }

Verdict criterion1() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const auto& m = *c.material;
  const auto p = wave_dispersion(m, c.wave_polarization(Wave::Pump), c.pump_wavelength());
  const auto i = wave_dispersion(m, c.wave_polarization(Wave::Idler), c.downconverted_wavelength());
  const double gvm = p.N_fs_per_mm - i.N_fs_per_mm;
  v.require(within_rel(gvm, 77.0, 0.15), "N_p - N_i = %.2f fs/mm (77 +- 15%%, theta_pm %.3f deg)", gvm,
            c.theta_pm_deg);
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const double rho = walkoff_deg(*c.material, c.wave_polarization(Wave::Pump), c.pump_wavelength());
  v.require(within_abs(rho, 4.0, 0.5), "rho_p = %.3f deg (4 +- 0.5)", rho);
  const double coeff = tilt_group_delay_coefficient(rho);
  v.require(within_rel(coeff, 240.0, 0.10), "tilt coefficient = %.1f fs/mm per tan(xi) (240 +- 10%%)",
            coeff);
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const auto m0 = marginals(compute_jsa(c, kPump2, testing::tilt(0.0), kGrid));
  const double diff = std::abs(m0.fwhm_s_nm - m0.fwhm_i_nm) / std::max(m0.fwhm_s_nm, m0.fwhm_i_nm);
  v.require(diff > 0.30, "xi=0 marginals %.2f/%.2f nm differ by %.0f%% (> 30%%)", m0.fwhm_s_nm,
            m0.fwhm_i_nm, 100 * diff);

  const auto sw = sweep_xi(-60.0, 45.0, 22, c, kPump2, kGrid);
  const bool all_ok = std::all_of(sw.points.begin(), sw.points.end(), [](auto& p) { return p.ok; });
  std::vector<Regime> seq;
  std::string trace;
  for (const auto& p : sw.points) {
    if (!p.ok) continue;
    if (p.regime != Regime::Asymmetric && (seq.empty() || seq.back() != p.regime)) seq.push_back(p.regime);
    trace += to_string(p.regime)[0];
  }
  const std::vector<Regime> want = {Regime::Correlated, Regime::Uncorrelated, Regime::Anticorrelated};
  v.require(all_ok && seq == want, "22-point sweep regimes %s (correlated -> uncorrelated -> anticorrelated)",
            trace.c_str());

  const double xu = sw.xi_uncorrelated.value_or(NAN);
  v.require(within_abs(xu, -20.0, 10.0), "uncorrelated xi = %.2f deg (-20 +- 10)", xu);

  auto best_in = [&](double lo, double hi, auto better) {
    const SweepPoint* best = nullptr;
    for (const auto& p : sw.points)
      if (p.ok && p.xi_deg >= lo && p.xi_deg <= hi && (!best || better(p.r, best->r))) best = &p;
    return best;
  };
  const auto* anti = best_in(28.0, 48.0, std::less<>{});
  v.require(anti && anti->r <= -0.9, "min r on [28, 48] deg = %.4f at %.1f (<= -0.9)", anti ? anti->r : NAN,
            anti ? anti->xi_deg : NAN);
  const auto* corr = best_in(-64.0, -40.0, std::greater<>{});
  v.require(corr && corr->r >= 0.5, "max r on [-64, -40] deg = %.4f at %.1f (>= 0.5)", corr ? corr->r : NAN,
            corr ? corr->xi_deg : NAN);
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto s = solve_xi_for_regime({SolveTarget::Uncorrelated}, testing::default_crystal(), kPump2, kGrid);
  v.require(s.at.metric <= 0.05, "at solved xi = %.2f deg: c^2/(ab) = %.4f (<= 0.05)", s.xi_deg, s.at.metric);
  v.require(s.at.entropy_bits <= 0.15, "Schmidt entropy = %.3f bits (<= 0.15)", s.at.entropy_bits);
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const auto s = solve_xi_for_regime({SolveTarget::Anticorrelated}, c, kPump2, kGrid);
  v.require(within_rel(s.at.fwhm_s_nm, 90.0, 0.30) && within_rel(s.at.fwhm_i_nm, 90.0, 0.30),
            "at solved xi = %.2f deg: singles FWHM %.1f/%.1f nm (90 +- 30%%)", s.xi_deg, s.at.fwhm_s_nm,
            s.at.fwhm_i_nm);
  const double tw = temporal_correlation_width(compute_jsa(c, kPump2, testing::tilt(s.xi_deg), kGrid));
  v.require(within_rel(tw, 12.0, 0.50), "temporal correlation width %.1f fs (12 +- 50%%)", tw);
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto pump = testing::default_pump(0.5);
  const auto s = solve_xi_for_regime({SolveTarget::Uncorrelated}, testing::default_crystal(), pump, kGrid);
  v.require(within_abs(s.at.fwhm_s_nm, 1.4, 0.2) && within_abs(s.at.fwhm_i_nm, 1.4, 0.2),
            "0.5 nm pump, solved xi = %.2f deg: marginals %.3f/%.3f nm (1.4 +- 0.2)", s.xi_deg,
            s.at.fwhm_s_nm, s.at.fwhm_i_nm);
  return v;
}

// Same oracles as the unit suite, re-run here so the criterion has its own verdict.
Verdict criterion7() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const auto& m = *c.material;

  const auto co = taylor_coefficients(c, {});
  const double w0 = omega0(800.0);
  double worst = 0.0;
  for (double ls = 795.0; ls <= 805.0; ls += 0.25)
    for (double li = 795.0; li <= 805.0; li += 0.25) {
      const double ws = omega0(ls), wi = omega0(li);
      const double exact = delta_k_exact(AngularFrequency{ws}, AngularFrequency{wi}, c);
      worst = std::max(worst, std::abs(exact - delta_k_taylor(ws - w0, wi - w0, co)) / (kPi / c.length_mm));
    }
  v.require(worst <= 0.01, "Taylor vs exact dk over +-5 nm: %.2e of pi/L (<= 1e-2)", worst);

  double worst_n = 0.0, worst_d = 0.0;
  for (double nm = 300.0; nm <= 2500.0; nm += 55.0)
    for (const auto pol : {WavePolarization::ordinary(), WavePolarization::extraordinary(c.theta_pm_deg)}) {
      const auto wd = wave_dispersion(m, pol, Wavelength{nm});
      const double w = omega0(nm);
      auto k = [&](double ww) { return wavevector_rad_per_mm(m, pol, AngularFrequency{ww}); };
      // Fourth-order central differences, then one Richardson step (h, 2h) to remove the h^4 term;
      // D crosses zero near 1.35 um; steps this large keep roundoff below the relative tolerance there.
      auto diffs = [&](double h) {
        const double km2 = k(w - 2 * h), km1 = k(w - h), k0 = k(w), kp1 = k(w + h), kp2 = k(w + 2 * h);
        return std::pair{(km2 - 8 * km1 + 8 * kp1 - kp2) / (12 * h),
                         (-km2 + 16 * km1 - 30 * k0 + 16 * kp1 - kp2) / (12 * h * h)};
      };
      const auto [a1, a2] = diffs(1e-2 * w);
      const auto [b1, b2] = diffs(2e-2 * w);
      const double d1 = (16 * a1 - b1) / 15, d2 = (16 * a2 - b2) / 15;
      worst_n = std::max(worst_n, std::abs(wd.N_fs_per_mm - d1) / std::abs(d1));
      worst_d = std::max(worst_d, std::abs(wd.D_fs2_per_mm - d2) / std::abs(d2));
    }
  v.require(worst_n <= 1e-6 && worst_d <= 1e-6, "analytic vs finite-difference N %.1e, D %.1e (<= 1e-6)",
            worst_n, worst_d);

  const auto product = testing::synthetic_grid(
      [](double x, double y) {
        return std::complex<double>(std::exp(-900 * x * x) * std::sin(30 * y + 1.0) * std::exp(-400 * y * y), 0);
      },
      96, 8.0, 80);
  const double ent = schmidt_decompose(product).entropy_bits;
  v.require(ent < 1e-6, "separable grid entropy %.1e bits (< 1e-6)", ent);

  const double a = 3000.0, b = 1800.0, cc = -1200.0;
  const auto f = fit_gaussian(testing::gaussian_intensity_grid(a, b, cc));
  const double fit_err = std::max({std::abs(f.a / a - 1), std::abs(f.b / b - 1), std::abs(f.c / cc - 1)});
  v.require(fit_err <= 1e-6, "Gaussian self-fit relative error %.1e (<= 1e-6)", fit_err);

  double worst_l = 0.0;
  for (double c2 : {-30.0, 15.0, 45.0}) {
    const double ga = 60.0, gb = 40.0;
    const int n = 160;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = -1.2 + 2.4 * k / (n - 1);
    std::vector<std::complex<double>> mat(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        mat[i * n + j] = std::exp(-ga * x[i] * x[i] - gb * x[j] * x[j] - 2 * c2 * x[i] * x[j]);
    const auto w = axis_weights(x);
    const auto s = schmidt_from_matrix(mat, n, n, w, w);
    const double t = std::abs(c2) / std::sqrt(ga * gb), mu = (1 - std::sqrt(1 - t * t)) / t;
    for (int k = 0; k < 8; ++k)
      worst_l = std::max(worst_l, std::abs(s.coefficients[k] - (1 - mu * mu) * std::pow(mu, 2 * k)));
  }
  v.require(worst_l <= 1e-4, "Gaussian-state Schmidt spectrum error %.1e (<= 1e-4)", worst_l);
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto& c = testing::default_crystal();
  const RegimeThresholds th{};
  for (double xi : {38.0, -20.0, -52.0}) {
    const auto g = compute_jsa(c, kPump2, testing::tilt(xi), kGrid);
    const Regime model = classify_regime(fit_gaussian(g), th);
    ScanConfig sc;
    sc.pair_rate_peak = 1e4;
    sc.rng_seed = 1;
    // Every other grid node on both axes, within the grid's own window.
    sc.step_s_nm = 2.0 * (g.lambda_s_nm.back() - g.lambda_s_nm.front()) / (g.n_s() - 1);
    sc.step_i_nm = 2.0 * (g.lambda_i_nm.back() - g.lambda_i_nm.front()) / (g.n_i() - 1);
    const auto ing = ingest_scan(simulate_scan(g, sc), g.meta.center_nm);
    const auto fit = fit_gaussian(ing.grid);
    const Regime back = classify_regime(fit, th);
    v.require(back == model, "xi=%.0f: %s -> %s (r %.3f)", xi, to_string(model), to_string(back), fit.r);
  }

  ScanConfig one;
  one.pair_rate_peak = 150.0;
  one.bandpass_fwhm_nm = 0.0;
  const auto g = compute_jsa(c, kPump2, testing::tilt(-20.0), kGrid);
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(g.intensity.begin(), g.intensity.end()) - g.intensity.begin());
  const double ls = g.lambda_s_nm[peak / g.n_i()], li = g.lambda_i_nm[peak % g.n_i()];
  one.range_s = WavelengthRange{ls, ls};
  one.range_i = WavelengthRange{li, li};
  std::vector<double> x;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    one.rng_seed = seed;
    x.push_back(static_cast<double>(simulate_scan(g, one, 1).at(0).coincidences));
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0.0;
  for (double e : x) var += (e - mean) * (e - mean);
  var /= x.size() - 1;
  v.require(std::abs(var - mean) / mean <= 0.10 && within_rel(mean, 150.0, 0.10),
            "1000 repeats at 150 counts: mean %.2f, variance %.2f (within 10%%)", mean, var);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, Verdict (*)()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  int failed = 0;
  bool broken = false;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
      broken = true;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, secs, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("summary: %d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return broken ? 1 : 0;
}
