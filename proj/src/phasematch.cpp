#include "spdc/phasematch.hpp"

#include "spdc/error.hpp"

#include <cmath>
#include <sstream>

namespace spdc {

WavePolarization CrystalConfig::wave_polarization(Wave w) const {
  switch (w) {
    case Wave::Pump: return {pol.pump, theta_pm_deg};
    case Wave::Signal: return {pol.signal, theta_pm_deg};
    case Wave::Idler: return {pol.idler, theta_pm_deg};
  }
  return {};
}

void CrystalConfig::validate() const {
  if (!material) throw_config("crystal.sellmeier", "no Sellmeier set");
  if (!(length_mm > 0.0)) throw_config("crystal.length_mm", "must be > 0");
  if (!(lambda_p0_nm > 0.0)) throw_config("crystal.lambda_p0_nm", "must be > 0");
  if (!(theta_pm_deg >= 0.0 && theta_pm_deg <= 90.0))
    throw_config("crystal.theta_pm_deg", "must lie in [0, 90]");
  for (double s : walkoff_sign)
    if (s != 1.0 && s != -1.0) throw_config("crystal.walkoff_sign", "entries must be +1 or -1");
}

double degenerate_mismatch(const SellmeierModel& material, double lambda_p0_nm,
                           const PolarizationAssignment& pol, double theta_deg) {
  const AngularFrequency wp = Wavelength{lambda_p0_nm}.to_frequency();
  const AngularFrequency wd{wp.rad_per_fs / 2.0};
  return wavevector_rad_per_mm(material, {pol.pump, theta_deg}, wp) -
         wavevector_rad_per_mm(material, {pol.signal, theta_deg}, wd) -
         wavevector_rad_per_mm(material, {pol.idler, theta_deg}, wd);
}

double solve_pm_angle(const SellmeierModel& material, double lambda_p0_nm,
                      const PolarizationAssignment& pol, double lo_deg, double hi_deg) {
  if (!(lo_deg >= 0.0 && hi_deg <= 90.0 && lo_deg < hi_deg))
    throw_domain("phase-matching bracket must lie within [0, 90] deg");
  auto f = [&](double th) { return degenerate_mismatch(material, lambda_p0_nm, pol, th); };

  // Coarse scan for the first sign change.
  constexpr int kScan = 180;
  double a = lo_deg, fa = f(a);
  double b = a, fb = fa;
  bool found = fa == 0.0;
  for (int i = 1; i <= kScan && !found; ++i) {
    b = lo_deg + (hi_deg - lo_deg) * i / kScan;
    fb = f(b);
    if (fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      found = true;
      break;
    }
    a = b;
    fa = fb;
  }
  if (!found) {
    std::ostringstream os;
    os << "no phase matching: k_p - k_s - k_i keeps one sign over [" << lo_deg << ", " << hi_deg
       << "] deg at lambda_p = " << lambda_p0_nm << " nm";
    throw_domain(os.str());
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  const double kp = wavevector_rad_per_mm(
      material, {pol.pump, a}, Wavelength{lambda_p0_nm}.to_frequency());
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0 || (b - a) < 1e-13) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (std::abs(fm) < 1e-12 * kp && (b - a) < 1e-10) return m;
  }
  return 0.5 * (a + b);
}

CrystalConfig make_phase_matched_crystal(std::shared_ptr<const SellmeierModel> material,
                                         double length_mm, double lambda_p0_nm,
                                         PolarizationAssignment pol) {
  CrystalConfig c;
  c.material = std::move(material);
  c.length_mm = length_mm;
  c.lambda_p0_nm = lambda_p0_nm;
  c.pol = pol;
  if (!c.material) throw_config("crystal.sellmeier", "no Sellmeier set");
  c.theta_pm_deg = solve_pm_angle(*c.material, lambda_p0_nm, pol);
  c.validate();
  return c;
}

double delta_k_exact(AngularFrequency omega_s, AngularFrequency omega_i,
                     const CrystalConfig& crystal) {
  const auto& m = *crystal.material;
  const AngularFrequency omega_p{omega_s.rad_per_fs + omega_i.rad_per_fs};
  return wavevector_rad_per_mm(m, crystal.wave_polarization(Wave::Pump), omega_p) -
         wavevector_rad_per_mm(m, crystal.wave_polarization(Wave::Signal), omega_s) -
         wavevector_rad_per_mm(m, crystal.wave_polarization(Wave::Idler), omega_i);
}

EffectiveWave effective_wave(const CrystalConfig& crystal, const TiltConfig& tilt, Wave w) {
  const Wavelength lambda =
      w == Wave::Pump ? crystal.pump_wavelength() : crystal.downconverted_wavelength();
  EffectiveWave out;
  out.material = wave_dispersion(*crystal.material, crystal.wave_polarization(w), lambda);
  const double xi = tilt.applies(w) ? tilt.xi_deg : 0.0;
  const double rho = crystal.walkoff_sign[static_cast<int>(w)] * out.material.rho_deg;
  out.N_eff = effective_inverse_group_velocity(out.material.N_fs_per_mm, rho, xi);
  out.D_eff = effective_gvd(out.material.D_fs2_per_mm, out.material.k_rad_per_nm, xi);
  return out;
}

TaylorCoefficients taylor_coefficients(const CrystalConfig& crystal, const TiltConfig& tilt) {
  crystal.validate();
  const auto p = effective_wave(crystal, tilt, Wave::Pump);
  const auto s = effective_wave(crystal, tilt, Wave::Signal);
  const auto i = effective_wave(crystal, tilt, Wave::Idler);
  TaylorCoefficients c;
  c.nps = p.N_eff - s.N_eff;
  c.npi = p.N_eff - i.N_eff;
  c.dps = p.D_eff - s.D_eff;
  c.dpi = p.D_eff - i.D_eff;
  c.dpp = p.D_eff;
  return c;
}

double xi_for_group_delay_match(const CrystalConfig& crystal, GroupDelayMatch kind,
                                const TiltConfig& tilt_template) {
  // Evaluate nps, npi at tan(xi) = 0 and tan(xi) = 1 (xi = 45 deg) to get the affine form.
  TiltConfig t0 = tilt_template, t1 = tilt_template;
  t0.xi_deg = 0.0;
  t1.xi_deg = 45.0;
  const auto c0 = taylor_coefficients(crystal, t0);
  const auto c1 = taylor_coefficients(crystal, t1);
  // Target g(t) = nps + sign * npi = 0, sign = -1 for antidiagonal, +1 for diagonal.
  const double sign = kind == GroupDelayMatch::Antidiagonal ? -1.0 : 1.0;
  const double g0 = c0.nps + sign * c0.npi;
  const double slope = (c1.nps + sign * c1.npi) - g0;
  if (slope == 0.0) throw_domain("tilt does not change the group-delay balance (no walk-off)");
  const double t = -g0 / slope;
  return rad_to_deg(std::atan(t));
}

}  // namespace spdc
