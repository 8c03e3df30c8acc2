#pragma once

#include "spdc/units.hpp"

namespace spdc {

enum class Wave { Pump = 0, Signal = 1, Idler = 2 };

// Pulse-front tilt shared by all three waves. `applied_to` lets a wave be excluded
// (its effective dispersion then equals the material value).
struct TiltConfig {
  double xi_deg = 0.0;
  bool applied_to[3] = {true, true, true};

  bool applies(Wave w) const { return applied_to[static_cast<int>(w)]; }
};

struct GratingSpec {
  double groove_density_per_mm = 0.0;
  double incidence_deg = 0.0;
  int diffraction_order = 1;
};

// N' = N + tan(xi) tan(rho) / c
double effective_inverse_group_velocity(double N_fs_per_mm, double rho_deg, double xi_deg);

// D' = D + (tan(xi)/c)^2 / k
double effective_gvd(double D_fs2_per_mm, double k_rad_per_nm, double xi_deg);

// Tilt per unit tan(xi) that walk-off rho adds to the inverse group velocity, fs/mm.
double tilt_group_delay_coefficient(double rho_deg);

// Diffracted angle from sin(theta_i) + sin(theta_d) = m lambda G.
double grating_diffraction_angle_deg(const GratingSpec& g, Wavelength lambda);

// tan(xi) = lambda m G / cos(theta_d)
double tilt_from_grating(const GratingSpec& g, Wavelength lambda);

}  // namespace spdc
