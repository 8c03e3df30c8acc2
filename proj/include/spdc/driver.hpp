#pragma once

#include "spdc/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace spdc {

struct CommandOutput {
  std::vector<std::filesystem::path> files;
  std::string summary;  // one line per fact, "key: value"
  std::vector<std::string> warnings;
};

// Grid CSV, PPM heatmap and metadata JSON for the configured tilt.
CommandOutput cmd_jsa(const RunConfig& cfg);
// Report for a grid CSV or a scan CSV (detected from the header).
CommandOutput cmd_analyze(const std::filesystem::path& input, const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);
CommandOutput cmd_scan(const RunConfig& cfg);
CommandOutput cmd_solve_xi(const RunConfig& cfg);

// JSON analysis report for a grid; `extra` entries (JSON text) are merged at top level.
std::string analysis_report(const JointSpectrumGrid& g, const RegimeThresholds& thresholds,
                            const std::string& config_hash, const std::string& source,
                            const std::vector<std::string>& assumptions,
                            const std::string& extra_json = {});

}  // namespace spdc
