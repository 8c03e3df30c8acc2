#pragma once

#include "spdc/analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spdc {

struct SweepPoint {
  double xi_deg = 0.0;
  double r = 0.0;
  double metric = 0.0;
  double entropy_bits = 0.0;
  double schmidt_number = 0.0;
  double fwhm_s_nm = 0.0;
  double fwhm_i_nm = 0.0;
  Regime regime = Regime::Asymmetric;
  bool ok = false;
  std::string error;  // set when the point failed; numeric fields are then NaN
};

struct SweepResult {
  std::vector<SweepPoint> points;  // strictly increasing xi
  std::optional<double> xi_uncorrelated;
  bool minimum_interior = false;
};

inline constexpr const char* kSweepCsvHeader = "xi_deg,r,metric,entropy_bits,K,fwhm_s_nm,fwhm_i_nm";

// Full pipeline (JSA, fit, Schmidt, marginals) at one tilt; failures are captured in the point.
SweepPoint evaluate_xi(const CrystalConfig& crystal, const PumpConfig& pump, const GridSpec& grid,
                       double xi_deg, const TiltConfig& tilt_template = {});

// Gaussian-fit metric alone (cheaper: no Schmidt); NaN on failure.
double metric_at(const CrystalConfig& crystal, const PumpConfig& pump, const GridSpec& grid,
                 double xi_deg, const TiltConfig& tilt_template = {});

// steps >= 2 equally spaced tilts on [lo, hi]; points run in parallel, order is stable.
SweepResult sweep_xi(double lo_deg, double hi_deg, int steps, const CrystalConfig& crystal,
                     const PumpConfig& pump, const GridSpec& grid,
                     const TiltConfig& tilt_template = {});

std::string sweep_csv_text(const SweepResult& s, const std::string& comment);

enum class SolveTarget {
  Uncorrelated,       // minimum of c^2/(ab)
  RValue,             // r(xi) = r_target
  Anticorrelated,     // group-velocity matched, N_s' = N_i'
  CorrelatedMatched,  // N_p' - N_s' = -(N_p' - N_i')
};

const char* to_string(SolveTarget t) noexcept;
SolveTarget parse_solve_target(const std::string& s);

struct SolveRequest {
  SolveTarget target = SolveTarget::Uncorrelated;
  double r_target = 0.0;
  double lo_deg = -75.0;
  double hi_deg = 75.0;
  double tolerance_deg = 0.1;
  double prescan_step_deg = 5.0;
};

struct SolveResult {
  double xi_deg = 0.0;
  SweepPoint at;               // full evaluation at the solution
  std::vector<SweepPoint> prescan;  // bracket scan (empty for closed-form targets)
};

SolveResult solve_xi_for_regime(const SolveRequest& req, const CrystalConfig& crystal,
                                const PumpConfig& pump, const GridSpec& grid,
                                const TiltConfig& tilt_template = {});

}  // namespace spdc
