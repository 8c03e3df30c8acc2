#pragma once

#include <numbers>

namespace spdc {

// Unit conventions at API boundaries: nm, fs, mm, degrees.
// Internally frequencies are rad/fs and angles radians.
inline constexpr double kSpeedOfLightNmPerFs = 299.792458;
inline constexpr double kSpeedOfLightMmPerFs = 2.99792458e-4;
inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct AngularFrequency;

// Vacuum wavelength in nm.
struct Wavelength {
  double nm = 0.0;

  AngularFrequency to_frequency() const;
  double micrometers() const { return nm * 1e-3; }
};

// Angular frequency in rad/fs.
struct AngularFrequency {
  double rad_per_fs = 0.0;

  Wavelength to_wavelength() const;
};

inline Wavelength operator""_nm(long double v) { return Wavelength{static_cast<double>(v)}; }

// Detuning from a reference wavelength, rad/fs.
double detuning(Wavelength lambda, Wavelength center);

// Converts a wavelength FWHM at `center` into an angular-frequency FWHM (first order).
double bandwidth_nm_to_rad_per_fs(double fwhm_nm, Wavelength center);
double bandwidth_rad_per_fs_to_nm(double fwhm_rad_per_fs, Wavelength center);

}  // namespace spdc
