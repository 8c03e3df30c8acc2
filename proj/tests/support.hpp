#pragma once

#include "spdc/analysis.hpp"
#include "spdc/biphoton.hpp"
#include "spdc/phasematch.hpp"

#include <cmath>
#include <filesystem>
#include <string>

namespace testing {

using namespace spdc;

// 3.5 mm BBO, 400 nm pump, phase matched for the default assignment.
inline const CrystalConfig& default_crystal() {
  static const CrystalConfig c =
      make_phase_matched_crystal(SellmeierModel::default_bbo(), 3.5, 400.0);
  return c;
}

inline PumpConfig default_pump(double fwhm_nm = 2.0) { return PumpConfig{400.0, fwhm_nm}; }

inline TiltConfig tilt(double xi) {
  TiltConfig t;
  t.xi_deg = xi;
  return t;
}

inline JointSpectrumGrid default_grid(double xi, double pump_fwhm_nm = 2.0, int n = 256) {
  GridSpec g;
  g.n_s = g.n_i = n;
  return compute_jsa(default_crystal(), default_pump(pump_fwhm_nm), tilt(xi), g);
}

// Grid on wavelength axes centered at 800 nm whose amplitude is f(ws, wi) (detunings rad/fs).
template <class F>
JointSpectrumGrid synthetic_grid(F f, int n, double half_span_nm, int n_i = -1) {
  if (n_i < 0) n_i = n;
  JointSpectrumGrid g;
  g.meta.center_nm = 800.0;
  g.meta.grid_hash = "synthetic";
  auto axis = [&](int m) {
    std::vector<double> a(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) a[k] = 800.0 - half_span_nm + 2.0 * half_span_nm * k / (m - 1);
    return a;
  };
  g.set_axes(axis(n), axis(n_i));
  g.amplitude.resize(g.n_s() * g.n_i());
  for (std::size_t is = 0; is < g.n_s(); ++is)
    for (std::size_t ii = 0; ii < g.n_i(); ++ii)
      g.amplitude[g.index(is, ii)] = f(g.omega_s[is], g.omega_i[ii]);
  g.normalize();
  return g;
}

// S = exp(-a x^2 - b y^2 - 2 c x y), i.e. amplitude exp(-(...)/2).
inline JointSpectrumGrid gaussian_intensity_grid(double a, double b, double c, int n = 128,
                                                 double half_span_nm = 20.0) {
  return synthetic_grid(
      [=](double x, double y) {
        return std::complex<double>(std::exp(-0.5 * (a * x * x + b * y * y + 2 * c * x * y)), 0);
      },
      n, half_span_nm);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spdc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
