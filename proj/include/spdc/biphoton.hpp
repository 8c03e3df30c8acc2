#pragma once

#include "spdc/phasematch.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdc {

// Gaussian pump; fwhm_nm is the intensity FWHM in wavelength at lambda0_nm.
struct PumpConfig {
  double lambda0_nm = 400.0;
  double fwhm_nm = 2.0;

  void validate() const;
  double fwhm_rad_per_fs() const;
};

// Complex pump amplitude at a total detuning ws + wi - wp0 (rad/fs); peak 1.
std::complex<double> pump_envelope(double total_detuning, const PumpConfig& pump);

// Axis half-widths are in nm around the degenerate wavelength; nullopt means auto-sized.
struct GridSpec {
  int n_s = 256;
  int n_i = 256;
  std::optional<double> span_s_nm;
  std::optional<double> span_i_nm;

  void validate() const;
};

struct GridMetadata {
  double xi_deg = 0.0;
  std::string sellmeier_name;
  double crystal_length_mm = 0.0;
  double theta_pm_deg = 0.0;
  double lambda_p0_nm = 0.0;
  double pump_fwhm_nm = 0.0;
  double center_nm = 0.0;  // degenerate wavelength the detunings refer to
  std::string grid_hash;
  // Set for grids built from measured or exported intensities; the amplitude is then sqrt(S)
  // under a zero-phase assumption.
  bool intensity_only = false;
};

// Row-major (signal index outer, idler index inner) joint spectrum on wavelength axes.
struct JointSpectrumGrid {
  std::vector<double> lambda_s_nm;
  std::vector<double> lambda_i_nm;
  std::vector<double> omega_s;  // detuning of each signal node, rad/fs
  std::vector<double> omega_i;
  std::vector<std::complex<double>> amplitude;
  std::vector<double> intensity;
  GridMetadata meta;

  std::size_t n_s() const { return lambda_s_nm.size(); }
  std::size_t n_i() const { return lambda_i_nm.size(); }
  std::size_t index(std::size_t is, std::size_t ii) const { return is * n_i() + ii; }
  double S(std::size_t is, std::size_t ii) const { return intensity[index(is, ii)]; }

  // Fills omega axes from the wavelength axes and meta.center_nm.
  void set_axes(std::vector<double> lambda_s, std::vector<double> lambda_i);
  // Peak-normalizes the amplitude and recomputes the intensity.
  void normalize();
  void validate() const;
};

struct ResolvedSpans {
  double span_s_nm = 0.0;
  double span_i_nm = 0.0;
};

// Coarse 64x64 probe that sizes both axes so the marginals fall below the edge threshold
// with at least 3x FWHM half-width.
ResolvedSpans auto_spans(const CrystalConfig& crystal, const PumpConfig& pump,
                         const TiltConfig& tilt, int probe_points = 64);

// Evaluates the amplitude on explicit spans; no auto-sizing.
JointSpectrumGrid evaluate_jsa(const CrystalConfig& crystal, const PumpConfig& pump,
                               const TaylorCoefficients& coeffs, double xi_deg, int n_s, int n_i,
                               double span_s_nm, double span_i_nm);

JointSpectrumGrid compute_jsa(const CrystalConfig& crystal, const PumpConfig& pump,
                              const TiltConfig& tilt, const GridSpec& grid);

inline constexpr double kEdgeThreshold = 1e-3;

struct Marginals {
  std::vector<double> signal;  // normalized to peak 1
  std::vector<double> idler;
  double fwhm_s_nm = 0.0;
  double fwhm_i_nm = 0.0;
  double edge_s = 0.0;  // largest end value of each marginal
  double edge_i = 0.0;
};

// Row/column sums and FWHM; throws a domain error when support reaches the grid edge.
Marginals marginals(const JointSpectrumGrid& grid);
// Same sums without the edge check.
Marginals marginals_unchecked(const JointSpectrumGrid& grid);

// 4-connected set of nodes with S >= threshold that contains `seed` (row-major node index).
std::vector<char> connected_support(const JointSpectrumGrid& grid, double threshold,
                                    std::size_t seed);
// Node closest to zero detuning on both axes.
std::size_t degenerate_node(const JointSpectrumGrid& grid);
// Marginals of S restricted to the lobe connected to the degenerate node. The second-order
// mismatch can phase-match a second, distant island; this keeps the grid on the central lobe.
Marginals central_lobe_marginals(const JointSpectrumGrid& grid);

// FWHM of the contiguous peak containing the maximum, by linear interpolation.
double peak_fwhm(std::span<const double> x, std::span<const double> y);

struct TimeProfile {
  std::vector<double> t_fs;
  std::vector<double> intensity;  // |transform|^2, peak 1
};

// Fourier transform of uniformly sampled spectral amplitude (spacing d_omega rad/fs)
// with `pad` x zero-padding; time axis centered at zero.
TimeProfile spectral_to_time(std::span<const std::complex<double>> samples, double d_omega,
                             int pad = 8);

// Raw transform sum_n x_n exp(-2 pi i k n / N), via FFTW.
std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> x);

struct AntidiagonalSlice {
  std::vector<double> omega;  // ws = omega, wi = -omega
  std::vector<std::complex<double>> amplitude;
};

AntidiagonalSlice antidiagonal_slice(const JointSpectrumGrid& grid, int samples = 1024);

// Intensity FWHM (fs) of the transform of the amplitude along ws = -wi.
double temporal_correlation_width(const JointSpectrumGrid& grid);

// Bilinear interpolation of the complex amplitude at wavelengths (nm); zero outside the grid.
std::complex<double> interpolate_amplitude(const JointSpectrumGrid& grid, double lambda_s_nm,
                                           double lambda_i_nm);

}  // namespace spdc
