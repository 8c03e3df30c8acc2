#pragma once

#include "spdc/units.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace spdc {

enum class Polarization { Ordinary, Extraordinary };

const char* to_string(Polarization p) noexcept;

struct WavePolarization {
  Polarization kind = Polarization::Ordinary;
  double theta_deg = 0.0;  // propagation angle to the optic axis, [0, 90]

  static WavePolarization ordinary(double theta_deg = 0.0) {
    return {Polarization::Ordinary, theta_deg};
  }
  static WavePolarization extraordinary(double theta_deg) {
    return {Polarization::Extraordinary, theta_deg};
  }
};

struct WaveDispersion {
  double k_rad_per_nm = 0.0;
  double N_fs_per_mm = 0.0;    // inverse group velocity dk/dw
  double D_fs2_per_mm = 0.0;   // group velocity dispersion d2k/dw2
  double rho_deg = 0.0;        // Poynting-vector walk-off

  double k_rad_per_mm() const { return k_rad_per_nm * 1e6; }
};

// Index value and its first two derivatives with respect to vacuum wavelength in um.
struct IndexDerivatives {
  double n = 0.0;
  double dn = 0.0;
  double d2n = 0.0;
};

// Principal refractive indices of a uniaxial crystal from a named Sellmeier set.
// Immutable after construction; share it freely between threads.
class SellmeierModel {
 public:
  enum class Formula {
    PoleMinusIr,  // n^2 = A + B/(l^2 - C) - D l^2
    Standard,     // n^2 = 1 + sum_j B_j l^2/(l^2 - C_j), coefficients as (B_j, C_j) pairs
  };

  SellmeierModel(std::string name, Formula formula, std::vector<double> ordinary,
                 std::vector<double> extraordinary, double window_lo_nm, double window_hi_nm);

  static SellmeierModel from_json_text(const std::string& text);
  static SellmeierModel load(const std::filesystem::path& path);
  // Built-in BBO set, read from the data directory.
  static std::shared_ptr<const SellmeierModel> default_bbo();

  const std::string& name() const { return name_; }
  Formula formula() const { return formula_; }
  double window_lo_nm() const { return window_lo_nm_; }
  double window_hi_nm() const { return window_hi_nm_; }

  void check_window(Wavelength lambda) const;

  // n_o or n_e with derivatives w.r.t. wavelength (um).
  IndexDerivatives principal(Polarization axis, Wavelength lambda) const;

 private:
  // Returns n^2 and its first two wavelength derivatives.
  std::array<double, 3> index_squared(const std::vector<double>& c, double lambda_um) const;

  std::string name_;
  Formula formula_;
  std::vector<double> ordinary_;
  std::vector<double> extraordinary_;
  double window_lo_nm_;
  double window_hi_nm_;
};

std::filesystem::path data_directory();

double refractive_index(const SellmeierModel& material, WavePolarization pol, Wavelength lambda);

// n(theta, lambda) with analytic wavelength derivatives.
IndexDerivatives index_with_derivatives(const SellmeierModel& material, WavePolarization pol,
                                        Wavelength lambda);

// Longitudinal wavevector in rad/mm as a function of angular frequency.
double wavevector_rad_per_mm(const SellmeierModel& material, WavePolarization pol,
                             AngularFrequency omega);

WaveDispersion wave_dispersion(const SellmeierModel& material, WavePolarization pol,
                               Wavelength lambda0);

double walkoff_deg(const SellmeierModel& material, WavePolarization pol, Wavelength lambda);

}  // namespace spdc
