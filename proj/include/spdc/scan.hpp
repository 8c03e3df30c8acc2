#pragma once

#include "spdc/biphoton.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spdc {

struct WavelengthRange {
  double lo_nm = 0.0;
  double hi_nm = 0.0;
};

struct ScanConfig {
  double bandpass_fwhm_nm = 0.2;  // Gaussian surrogate for each monochromator
  double step_s_nm = 0.2;
  double step_i_nm = 0.2;
  std::optional<WavelengthRange> range_s;  // defaults to the grid's signal axis
  std::optional<WavelengthRange> range_i;
  double pair_rate_peak = 1e4;        // coincidences/s at the JSI peak
  double integration_time_s = 1.0;
  double dark_coincidence_rate = 0.0;
  double singles_efficiency = 0.1;    // coincidences per single, for the singles streams
  std::uint64_t rng_seed = 1;

  void validate() const;
  // Non-fatal findings, e.g. coarse sampling relative to the bandpass.
  std::vector<std::string> warnings() const;
};

struct CoincidenceRecord {
  double lambda_s_nm = 0.0;
  double lambda_i_nm = 0.0;
  std::int64_t coincidences = 0;
  std::int64_t singles_s = 0;
  std::int64_t singles_i = 0;
  double integration_time_s = 0.0;
};

inline constexpr const char* kScanCsvHeader =
    "lambda_s_nm,lambda_i_nm,coincidences,singles_s,singles_i,t_s";

// S convolved with the separable Gaussian bandpass on the grid nodes, peak 1.
std::vector<double> bandpass_convolved(const JointSpectrumGrid& grid, double fwhm_nm);

struct ExpectedRates {
  double coincidences = 0.0;
  double singles_s = 0.0;
  double singles_i = 0.0;
};

// Noise-free rates (counts/s) at each scan point, in record order.
std::vector<ExpectedRates> expected_scan_rates(const JointSpectrumGrid& grid,
                                               const ScanConfig& cfg,
                                               std::vector<CoincidenceRecord>* layout = nullptr);

// Poisson counts; point k draws from a substream derived from (rng_seed, k), so the output is
// independent of `threads`. threads = 0 uses the hardware concurrency.
std::vector<CoincidenceRecord> simulate_scan(const JointSpectrumGrid& grid, const ScanConfig& cfg,
                                             unsigned threads = 0);

void write_scan_csv(const std::filesystem::path& path, const std::vector<CoincidenceRecord>& recs,
                    const std::string& comment = {});
std::string scan_csv_text(const std::vector<CoincidenceRecord>& recs, const std::string& comment);
std::vector<CoincidenceRecord> parse_scan_csv(const std::string& text);
std::vector<CoincidenceRecord> read_scan_csv(const std::filesystem::path& path);

struct IngestResult {
  JointSpectrumGrid grid;
  double dark_rate_estimate = 0.0;  // counts/s subtracted from every point
  std::size_t clipped_points = 0;   // points that went negative after subtraction
};

// Background-subtracted, peak-normalized intensity grid from a rectangular scan. The detunings
// refer to center_nm, or to the middle of the scanned ranges when not given.
IngestResult ingest_scan(const std::vector<CoincidenceRecord>& recs,
                         std::optional<double> center_nm = std::nullopt);
IngestResult ingest_scan_file(const std::filesystem::path& path,
                              std::optional<double> center_nm = std::nullopt);

}  // namespace spdc
