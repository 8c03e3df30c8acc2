#pragma once

#include "spdc/scan.hpp"
#include "spdc/sweep.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace spdc {

struct SweepSpec {
  double xi_min_deg = -60.0;
  double xi_max_deg = 45.0;
  int steps = 22;
};

// One run recipe. Precedence: command-line overrides > config file > these defaults.
struct RunConfig {
  std::string sellmeier_file;  // empty: bundled BBO set
  double length_mm = 3.5;
  double lambda_p0_nm = 400.0;
  std::optional<double> theta_pm_deg;  // solved when absent
  bool swap_signal_idler = false;
  std::array<double, 3> walkoff_sign = {1.0, 1.0, 1.0};

  PumpConfig pump;
  TiltConfig tilt;
  std::optional<GratingSpec> grating;  // replaces tilt.xi_deg when present
  GridSpec grid;
  ScanConfig scan;
  SweepSpec sweep;
  SolveRequest solve;
  RegimeThresholds thresholds;

  std::string output_dir = "out";
  std::uint64_t rng_seed = 1;
};

// Strict JSON reader: unknown keys and wrong types are config errors naming the field.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
// Resolves a preset name (fig3a, ...) in the preset directory.
std::filesystem::path preset_path(const std::string& name);
std::filesystem::path preset_directory();

// Canonical JSON of every field that affects results (output_dir excluded).
std::string canonical_config_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

CrystalConfig build_crystal(const RunConfig& cfg);
// Tilt with xi taken from the grating when one is configured.
TiltConfig build_tilt(const RunConfig& cfg, const CrystalConfig& crystal);
ScanConfig build_scan(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace spdc
