#pragma once

#include "spdc/dispersion.hpp"
#include "spdc/tilt.hpp"

#include <array>
#include <memory>

namespace spdc {

struct PolarizationAssignment {
  Polarization pump = Polarization::Extraordinary;
  Polarization signal = Polarization::Extraordinary;
  Polarization idler = Polarization::Ordinary;

  // e -> e + o with the two downconverted labels exchanged.
  PolarizationAssignment swapped() const { return {pump, idler, signal}; }
};

// Collinear degenerate crystal: signal and idler centered at 2 * lambda_p0.
struct CrystalConfig {
  std::shared_ptr<const SellmeierModel> material;
  double length_mm = 3.5;
  double theta_pm_deg = 0.0;
  double lambda_p0_nm = 400.0;
  PolarizationAssignment pol;
  // Sign with which each wave's walk-off enters the tilt terms (pump, signal, idler).
  std::array<double, 3> walkoff_sign = {1.0, 1.0, 1.0};

  Wavelength pump_wavelength() const { return {lambda_p0_nm}; }
  Wavelength downconverted_wavelength() const { return {2.0 * lambda_p0_nm}; }
  WavePolarization wave_polarization(Wave w) const;
  void validate() const;
};

// Builds a crystal with theta_pm solved for the given assignment.
CrystalConfig make_phase_matched_crystal(std::shared_ptr<const SellmeierModel> material,
                                         double length_mm, double lambda_p0_nm,
                                         PolarizationAssignment pol = {});

struct TaylorCoefficients {
  double nps = 0.0;  // N_p' - N_s', fs/mm
  double npi = 0.0;  // N_p' - N_i', fs/mm
  double dps = 0.0;  // D_p' - D_s', fs^2/mm
  double dpi = 0.0;  // D_p' - D_i', fs^2/mm
  double dpp = 0.0;  // D_p', fs^2/mm
};

struct EffectiveWave {
  WaveDispersion material;
  double N_eff = 0.0;
  double D_eff = 0.0;
};

// Phase mismatch k_p - k_s - k_i at the degenerate frequencies for angle theta (rad/mm).
double degenerate_mismatch(const SellmeierModel& material, double lambda_p0_nm,
                           const PolarizationAssignment& pol, double theta_deg);

// Root of the degenerate mismatch in (lo, hi); brackets are found by a coarse scan.
double solve_pm_angle(const SellmeierModel& material, double lambda_p0_nm,
                      const PolarizationAssignment& pol, double lo_deg = 0.0,
                      double hi_deg = 90.0);

// Full-dispersion mismatch k_p(ws + wi) - k_s(ws) - k_i(wi) without tilt (rad/mm).
double delta_k_exact(AngularFrequency omega_s, AngularFrequency omega_i,
                     const CrystalConfig& crystal);

EffectiveWave effective_wave(const CrystalConfig& crystal, const TiltConfig& tilt, Wave w);

TaylorCoefficients taylor_coefficients(const CrystalConfig& crystal, const TiltConfig& tilt);

// Second-order expansion in the signal/idler detunings (rad/fs) -> rad/mm.
constexpr double delta_k_taylor(double omega_s, double omega_i, const TaylorCoefficients& c) {
  return c.nps * omega_s + c.npi * omega_i + 0.5 * c.dps * omega_s * omega_s +
         0.5 * c.dpi * omega_i * omega_i + c.dpp * omega_s * omega_i;
}

enum class GroupDelayMatch {
  Antidiagonal,  // N_s' = N_i': first-order mismatch vanishes along ws = -wi
  Diagonal,      // N_p' - N_s' = -(N_p' - N_i'): first-order mismatch vanishes along ws = wi
};

// Tilt angle at which the first-order coefficients satisfy the requested balance.
// The coefficients are affine in tan(xi), so the solution is closed form.
double xi_for_group_delay_match(const CrystalConfig& crystal, GroupDelayMatch kind,
                                const TiltConfig& tilt_template = {});

}  // namespace spdc
