#include "spdc/tilt.hpp"

#include "spdc/error.hpp"

#include <cmath>
#include <string>

namespace spdc {

namespace {

double checked_tan_xi(double xi_deg) {
  if (!(std::abs(xi_deg) < 90.0))
    throw_domain("pulse-front tilt must satisfy |xi| < 90 deg, got " + std::to_string(xi_deg));
  return std::tan(deg_to_rad(xi_deg));
}

}  // namespace

double effective_inverse_group_velocity(double N_fs_per_mm, double rho_deg, double xi_deg) {
  const double t = checked_tan_xi(xi_deg);
  return N_fs_per_mm + t * std::tan(deg_to_rad(rho_deg)) / kSpeedOfLightMmPerFs;
}

double effective_gvd(double D_fs2_per_mm, double k_rad_per_nm, double xi_deg) {
  if (!(k_rad_per_nm > 0.0)) throw_domain("wavevector must be positive");
  const double t = checked_tan_xi(xi_deg) / kSpeedOfLightMmPerFs;
  return D_fs2_per_mm + t * t / (k_rad_per_nm * 1e6);
}

double tilt_group_delay_coefficient(double rho_deg) {
  return std::tan(deg_to_rad(rho_deg)) / kSpeedOfLightMmPerFs;
}

double grating_diffraction_angle_deg(const GratingSpec& g, Wavelength lambda) {
  if (!(g.groove_density_per_mm > 0.0)) throw_domain("groove density must be positive");
  if (!(std::abs(g.incidence_deg) < 90.0)) throw_domain("|incidence angle| must be < 90 deg");
  if (!(lambda.nm > 0.0)) throw_domain("wavelength must be positive");
  const double s = g.diffraction_order * lambda.nm * 1e-6 * g.groove_density_per_mm -
                   std::sin(deg_to_rad(g.incidence_deg));
  if (std::abs(s) >= 1.0)
    throw_domain("grating equation has no real solution for order " +
                 std::to_string(g.diffraction_order) + " at " + std::to_string(lambda.nm) + " nm");
  return rad_to_deg(std::asin(s));
}

double tilt_from_grating(const GratingSpec& g, Wavelength lambda) {
  const double theta_d = deg_to_rad(grating_diffraction_angle_deg(g, lambda));
  const double angular_dispersion =
      lambda.nm * 1e-6 * g.diffraction_order * g.groove_density_per_mm / std::cos(theta_d);
  return rad_to_deg(std::atan(angular_dispersion));
}

}  // namespace spdc
