#include "spdc/grid_io.hpp"

#include "spdc/error.hpp"
#include "spdc/hash.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace spdc {

namespace {

std::string join_row(const char* label, const std::vector<double>& v) {
  std::string s = label;
  for (double x : v) s += ',' + format_double(x);
  return s + '\n';
}

std::vector<double> split_numbers(std::string_view line, std::size_t lineno) {
  std::vector<double> out;
  while (true) {
    const auto comma = line.find(',');
    const auto field = line.substr(0, comma);
    double v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw_parse("grid CSV line " + std::to_string(lineno) + ": bad number '" +
                  std::string(field) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

// Perceptually ordered ramp (black -> blue -> magenta -> orange -> pale yellow).
std::array<unsigned char, 3> colormap(double s) {
  static constexpr double stops[][3] = {
      {0, 0, 4}, {40, 11, 84}, {101, 21, 110}, {159, 42, 99},
      {212, 72, 66}, {245, 125, 21}, {250, 193, 39}, {252, 255, 164}};
  constexpr int n = 8;
  s = std::clamp(s, 0.0, 1.0) * (n - 1);
  const int k = std::min(static_cast<int>(s), n - 2);
  const double f = s - k;
  std::array<unsigned char, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<unsigned char>(std::lround((1 - f) * stops[k][c] + f * stops[k + 1][c]));
  return rgb;
}

}  // namespace

std::string grid_csv_text(const JointSpectrumGrid& g, const std::string& config_hash) {
  std::string out;
  out += "# spdc joint spectral intensity S (peak 1), rows = signal wavelength\n";
  out += "# config_hash: " + config_hash + "\n";
  out += "# grid_hash: " + g.meta.grid_hash + "\n";
  out += "# sellmeier: " + g.meta.sellmeier_name + "\n";
  out += "# xi_deg: " + format_double(g.meta.xi_deg) + "\n";
  out += "# center_nm: " + format_double(g.meta.center_nm) + "\n";
  out += "# intensity_only: " + std::string(g.meta.intensity_only ? "true" : "false") + "\n";
  out += join_row("lambda_s_nm", g.lambda_s_nm);
  out += join_row("lambda_i_nm", g.lambda_i_nm);
  std::string row;
  for (std::size_t is = 0; is < g.n_s(); ++is) {
    row.clear();
    for (std::size_t ii = 0; ii < g.n_i(); ++ii) {
      if (ii) row += ',';
      row += format_double(g.S(is, ii));
    }
    out += row + '\n';
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& path, const JointSpectrumGrid& g,
                    const std::string& config_hash) {
  write_text_file(path, grid_csv_text(g, config_hash));
}

JointSpectrumGrid parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::string> meta;
  std::vector<double> ls, li;
  std::vector<double> s;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto key = line.substr(1, colon - 1);
        auto val = line.substr(colon + 1);
        key.erase(0, key.find_first_not_of(' '));
        val.erase(0, val.find_first_not_of(' '));
        meta[key] = val;
      }
      continue;
    }
    if (ls.empty()) {
      if (line.rfind("lambda_s_nm,", 0) != 0)
        throw_parse("grid CSV: expected 'lambda_s_nm,...' axis row at line " +
                    std::to_string(lineno));
      ls = split_numbers(std::string_view(line).substr(12), lineno);
      continue;
    }
    if (li.empty()) {
      if (line.rfind("lambda_i_nm,", 0) != 0)
        throw_parse("grid CSV: expected 'lambda_i_nm,...' axis row at line " +
                    std::to_string(lineno));
      li = split_numbers(std::string_view(line).substr(12), lineno);
      continue;
    }
    auto row = split_numbers(line, lineno);
    if (row.size() != li.size())
      throw_parse("grid CSV line " + std::to_string(lineno) + ": expected " +
                  std::to_string(li.size()) + " values, got " + std::to_string(row.size()));
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw_parse("grid CSV line " + std::to_string(lineno) + ": S must be finite and >= 0");
    s.insert(s.end(), row.begin(), row.end());
    ++rows;
  }
  if (ls.empty() || li.empty()) throw_parse("grid CSV: missing axis rows");
  if (rows != ls.size())
    throw_parse("grid CSV: expected " + std::to_string(ls.size()) + " S rows, got " +
                std::to_string(rows) + " (truncated file?)");

  JointSpectrumGrid g;
  g.meta.intensity_only = true;
  g.meta.grid_hash = meta.count("grid_hash") ? meta["grid_hash"] : hash_hex(text);
  g.meta.sellmeier_name = meta.count("sellmeier") ? meta["sellmeier"] : "unknown";
  auto num = [&](const char* key, double fallback) {
    if (!meta.count(key)) return fallback;
    double v{};
    const auto& t = meta[key];
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw_parse(std::string("grid CSV: bad ") + key + " '" + t + "'");
    return v;
  };
  g.meta.xi_deg = num("xi_deg", std::nan(""));
  g.meta.center_nm =
      num("center_nm", 0.25 * (ls.front() + ls.back() + li.front() + li.back()));
  g.set_axes(std::move(ls), std::move(li));
  g.amplitude.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) g.amplitude[k] = std::sqrt(s[k]);
  g.intensity = s;
  g.validate();
  g.normalize();
  return g;
}

JointSpectrumGrid read_grid_csv(const std::filesystem::path& path) {
  return parse_grid_csv(read_text_file(path));
}

std::string grid_metadata_json(const JointSpectrumGrid& g, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["grid_hash"] = g.meta.grid_hash;
  j["sellmeier"] = g.meta.sellmeier_name;
  j["xi_deg"] = g.meta.xi_deg;
  j["crystal_length_mm"] = g.meta.crystal_length_mm;
  j["theta_pm_deg"] = g.meta.theta_pm_deg;
  j["lambda_p0_nm"] = g.meta.lambda_p0_nm;
  j["pump_fwhm_nm"] = g.meta.pump_fwhm_nm;
  j["center_nm"] = g.meta.center_nm;
  j["n_s"] = g.n_s();
  j["n_i"] = g.n_i();
  j["lambda_s_range_nm"] = {g.lambda_s_nm.front(), g.lambda_s_nm.back()};
  j["lambda_i_range_nm"] = {g.lambda_i_nm.front(), g.lambda_i_nm.back()};
  j["intensity_only"] = g.meta.intensity_only;
  return j.dump(2) + "\n";
}

std::string heatmap_ppm(const JointSpectrumGrid& g, const std::string& config_hash) {
  const std::size_t w = g.n_i(), h = g.n_s();
  std::string out = "P6\n# config_hash " + config_hash + " grid_hash " + g.meta.grid_hash +
                    "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + 3 * w * h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t is = h - 1 - row;
    for (std::size_t ii = 0; ii < w; ++ii) {
      const auto rgb = colormap(g.S(is, ii));
      out.append(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
  return out;
}

std::string grid_file_stem(const JointSpectrumGrid& g) {
  char xi[32];
  if (std::isnan(g.meta.xi_deg))
    std::snprintf(xi, sizeof xi, "nan");
  else
    std::snprintf(xi, sizeof xi, "%+.2f", g.meta.xi_deg == 0.0 ? 0.0 : g.meta.xi_deg);
  return std::string("jsa_xi") + xi + "_" + g.meta.grid_hash;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write " + path.string());
  out << text;
  if (!out) throw_io("write failed: " + path.string());
}

}  // namespace spdc
