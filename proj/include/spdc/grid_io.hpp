#pragma once

#include "spdc/biphoton.hpp"

#include <filesystem>
#include <string>

namespace spdc {

// Grid CSV: "# key: value" comment lines, then
//   lambda_s_nm,<signal axis>
//   lambda_i_nm,<idler axis>
// and one row of S per signal wavelength.
std::string grid_csv_text(const JointSpectrumGrid& g, const std::string& config_hash);
void write_grid_csv(const std::filesystem::path& path, const JointSpectrumGrid& g,
                    const std::string& config_hash);

// Reads intensities back; amplitude = sqrt(S) and the grid is flagged intensity-only.
JointSpectrumGrid parse_grid_csv(const std::string& text);
JointSpectrumGrid read_grid_csv(const std::filesystem::path& path);

// Companion metadata as JSON text.
std::string grid_metadata_json(const JointSpectrumGrid& g, const std::string& config_hash);

// Binary PPM (P6) of S, idler wavelength left to right, signal wavelength bottom to top.
std::string heatmap_ppm(const JointSpectrumGrid& g, const std::string& config_hash);

// "jsa_xi+38.00_<grid hash>"
std::string grid_file_stem(const JointSpectrumGrid& g);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spdc
