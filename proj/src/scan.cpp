#include "spdc/scan.hpp"

#include "spdc/error.hpp"
#include "spdc/grid_io.hpp"
#include "spdc/hash.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace spdc {

void ScanConfig::validate() const {
  if (!(bandpass_fwhm_nm >= 0.0)) throw_config("scan.bandpass_fwhm_nm", "must be >= 0");
  if (!(step_s_nm > 0.0)) throw_config("scan.step_s_nm", "must be > 0");
  if (!(step_i_nm > 0.0)) throw_config("scan.step_i_nm", "must be > 0");
  if (!(pair_rate_peak > 0.0)) throw_config("scan.pair_rate_peak", "must be > 0");
  if (!(integration_time_s > 0.0)) throw_config("scan.integration_time_s", "must be > 0");
  if (!(dark_coincidence_rate >= 0.0)) throw_config("scan.dark_coincidence_rate", "must be >= 0");
  if (!(singles_efficiency > 0.0 && singles_efficiency <= 1.0))
    throw_config("scan.singles_efficiency", "must lie in (0, 1]");
  for (const auto* r : {&range_s, &range_i})
    if (*r && !((*r)->hi_nm >= (*r)->lo_nm))
      throw_config(r == &range_s ? "scan.range_s" : "scan.range_i", "needs lo <= hi");
}

std::vector<std::string> ScanConfig::warnings() const {
  std::vector<std::string> w;
  if (step_s_nm > bandpass_fwhm_nm || step_i_nm > bandpass_fwhm_nm)
    w.push_back("scan step exceeds the bandpass FWHM; the scan undersamples the bandpass");
  return w;
}

namespace {

std::vector<double> convolve_axis(const std::vector<double>& field, std::size_t rows,
                                  std::size_t cols, const std::vector<double>& axis,
                                  double fwhm, bool along_rows) {
  // along_rows: convolve over the row index (signal axis); else over columns.
  const std::size_t n = along_rows ? rows : cols;
  std::vector<double> kernel(n * n);
  const double k4 = 4.0 * std::numbers::ln2 / (fwhm * fwhm);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const double d = axis[a] - axis[b];
      kernel[a * n + b] = std::exp(-k4 * d * d);
      sum += kernel[a * n + b];
    }
    for (std::size_t b = 0; b < n; ++b) kernel[a * n + b] /= sum;
  }
  std::vector<double> out(field.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      if (along_rows)
        for (std::size_t b = 0; b < rows; ++b) acc += kernel[r * n + b] * field[b * cols + c];
      else
        for (std::size_t b = 0; b < cols; ++b) acc += kernel[c * n + b] * field[r * cols + b];
      out[r * cols + c] = acc;
    }
  return out;
}

bool locate(const std::vector<double>& axis, double x, std::size_t& k, double& f) {
  const double tol = 1e-9 * std::max(1.0, std::abs(x));
  if (x < axis.front() - tol || x > axis.back() + tol) return false;
  x = std::clamp(x, axis.front(), axis.back());
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::ptrdiff_t idx = (it - axis.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(axis.size()) - 2);
  k = static_cast<std::size_t>(idx);
  f = (x - axis[k]) / (axis[k + 1] - axis[k]);
  return true;
}

double interp1(const std::vector<double>& axis, const std::vector<double>& v, double x) {
  std::size_t k;
  double f;
  if (!locate(axis, x, k, f)) return 0.0;
  return (1 - f) * v[k] + f * v[k + 1];
}

std::vector<double> scan_axis(const WavelengthRange& r, double step) {
  const auto n = static_cast<std::size_t>(std::floor((r.hi_nm - r.lo_nm) / step + 1e-9)) + 1;
  std::vector<double> axis(n);
  for (std::size_t k = 0; k < n; ++k) axis[k] = r.lo_nm + static_cast<double>(k) * step;
  return axis;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x53504443u};
  return std::mt19937_64(seq);
}

std::int64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

}  // namespace

std::vector<double> bandpass_convolved(const JointSpectrumGrid& grid, double fwhm_nm) {
  std::vector<double> field = grid.intensity;
  if (fwhm_nm > 0.0) {
    field = convolve_axis(field, grid.n_s(), grid.n_i(), grid.lambda_s_nm, fwhm_nm, true);
    field = convolve_axis(field, grid.n_s(), grid.n_i(), grid.lambda_i_nm, fwhm_nm, false);
  }
  const double peak = *std::max_element(field.begin(), field.end());
  if (!(peak > 0.0)) throw_numeric("bandpass-convolved spectrum vanishes");
  for (double& v : field) v /= peak;
  return field;
}

std::vector<ExpectedRates> expected_scan_rates(const JointSpectrumGrid& grid,
                                               const ScanConfig& cfg,
                                               std::vector<CoincidenceRecord>* layout) {
  cfg.validate();
  const WavelengthRange rs =
      cfg.range_s.value_or(WavelengthRange{grid.lambda_s_nm.front(), grid.lambda_s_nm.back()});
  const WavelengthRange ri =
      cfg.range_i.value_or(WavelengthRange{grid.lambda_i_nm.front(), grid.lambda_i_nm.back()});
  auto inside = [](const WavelengthRange& r, const std::vector<double>& axis) {
    const double tol = 1e-9 * axis.back();
    return r.lo_nm >= axis.front() - tol && r.hi_nm <= axis.back() + tol;
  };
  if (!inside(rs, grid.lambda_s_nm))
    throw_domain("scan signal range lies outside the grid's signal axis");
  if (!inside(ri, grid.lambda_i_nm))
    throw_domain("scan idler range lies outside the grid's idler axis");

  const auto conv = bandpass_convolved(grid, cfg.bandpass_fwhm_nm);
  std::vector<double> ms(grid.n_s(), 0.0), mi(grid.n_i(), 0.0);
  for (std::size_t is = 0; is < grid.n_s(); ++is)
    for (std::size_t ii = 0; ii < grid.n_i(); ++ii) {
      ms[is] += conv[grid.index(is, ii)];
      mi[ii] += conv[grid.index(is, ii)];
    }
  const double ms_peak = *std::max_element(ms.begin(), ms.end());
  const double mi_peak = *std::max_element(mi.begin(), mi.end());
  for (double& v : ms) v /= ms_peak;
  for (double& v : mi) v /= mi_peak;

  const auto axis_s = scan_axis(rs, cfg.step_s_nm);
  const auto axis_i = scan_axis(ri, cfg.step_i_nm);
  std::vector<ExpectedRates> rates;
  rates.reserve(axis_s.size() * axis_i.size());
  if (layout) layout->clear();
  const double singles_scale = cfg.pair_rate_peak / cfg.singles_efficiency;
  for (double ls : axis_s) {
    for (double li : axis_i) {
      std::size_t ks, ki;
      double fs, fi;
      locate(grid.lambda_s_nm, ls, ks, fs);
      locate(grid.lambda_i_nm, li, ki, fi);
      const double s = (1 - fs) * (1 - fi) * conv[grid.index(ks, ki)] +
                       (1 - fs) * fi * conv[grid.index(ks, ki + 1)] +
                       fs * (1 - fi) * conv[grid.index(ks + 1, ki)] +
                       fs * fi * conv[grid.index(ks + 1, ki + 1)];
      ExpectedRates r;
      r.coincidences = cfg.pair_rate_peak * s + cfg.dark_coincidence_rate;
      r.singles_s = singles_scale * interp1(grid.lambda_s_nm, ms, ls);
      r.singles_i = singles_scale * interp1(grid.lambda_i_nm, mi, li);
      rates.push_back(r);
      if (layout) layout->push_back({ls, li, 0, 0, 0, cfg.integration_time_s});
    }
  }
  return rates;
}

std::vector<CoincidenceRecord> simulate_scan(const JointSpectrumGrid& grid, const ScanConfig& cfg,
                                             unsigned threads) {
  std::vector<CoincidenceRecord> recs;
  const auto rates = expected_scan_rates(grid, cfg, &recs);
  const std::size_t n = recs.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto rng = substream(cfg.rng_seed, k);
      const double t = cfg.integration_time_s;
      recs[k].coincidences = poisson(rng, rates[k].coincidences * t);
      recs[k].singles_s = poisson(rng, rates[k].singles_s * t);
      recs[k].singles_i = poisson(rng, rates[k].singles_i * t);
    }
  };
  if (threads <= 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return recs;
}

std::string scan_csv_text(const std::vector<CoincidenceRecord>& recs, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += kScanCsvHeader;
  out += '\n';
  char line[256];
  for (const auto& r : recs) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%lld,%lld,%lld,%s\n", r.lambda_s_nm,
                  r.lambda_i_nm, static_cast<long long>(r.coincidences),
                  static_cast<long long>(r.singles_s), static_cast<long long>(r.singles_i),
                  format_double(r.integration_time_s).c_str());
    out += line;
  }
  return out;
}

void write_scan_csv(const std::filesystem::path& path, const std::vector<CoincidenceRecord>& recs,
                    const std::string& comment) {
  write_text_file(path, scan_csv_text(recs, comment));
}

namespace {

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* column) {
  T v{};
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw_parse("scan CSV line " + std::to_string(line) + ": bad value '" + std::string(s) +
                "' in column " + column);
  return v;
}

}  // namespace

std::vector<CoincidenceRecord> parse_scan_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<CoincidenceRecord> recs;
  static constexpr const char* kColumns[] = {"lambda_s_nm", "lambda_i_nm", "coincidences",
                                             "singles_s", "singles_i", "t_s"};
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kScanCsvHeader)
        throw_parse("scan CSV: expected header '" + std::string(kScanCsvHeader) + "'");
      header = true;
      continue;
    }
    std::string_view rest(line);
    std::string_view f[6];
    for (int c = 0; c < 6; ++c) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (c == 5))
        throw_parse("scan CSV line " + std::to_string(lineno) + ": expected 6 fields");
      f[c] = rest.substr(0, comma);
      if (c < 5) rest.remove_prefix(comma + 1);
    }
    CoincidenceRecord r;
    r.lambda_s_nm = parse_number<double>(f[0], lineno, kColumns[0]);
    r.lambda_i_nm = parse_number<double>(f[1], lineno, kColumns[1]);
    r.coincidences = parse_number<std::int64_t>(f[2], lineno, kColumns[2]);
    r.singles_s = parse_number<std::int64_t>(f[3], lineno, kColumns[3]);
    r.singles_i = parse_number<std::int64_t>(f[4], lineno, kColumns[4]);
    r.integration_time_s = parse_number<double>(f[5], lineno, kColumns[5]);
    if (r.coincidences < 0 || r.singles_s < 0 || r.singles_i < 0)
      throw_parse("scan CSV line " + std::to_string(lineno) + ": negative counts");
    if (!(r.integration_time_s > 0.0))
      throw_parse("scan CSV line " + std::to_string(lineno) + ": t_s must be > 0");
    if (!(r.lambda_s_nm > 0.0 && r.lambda_i_nm > 0.0))
      throw_parse("scan CSV line " + std::to_string(lineno) + ": wavelengths must be > 0");
    recs.push_back(r);
  }
  if (!header) throw_parse("scan CSV: empty file (no header)");
  if (recs.empty()) throw_parse("scan CSV: no scan points");
  return recs;
}

std::vector<CoincidenceRecord> read_scan_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scan_csv(ss.str());
}

IngestResult ingest_scan(const std::vector<CoincidenceRecord>& recs,
                         std::optional<double> center_nm) {
  if (recs.empty()) throw_parse("scan has no points");
  std::vector<double> ls, li;
  for (const auto& r : recs) {
    ls.push_back(r.lambda_s_nm);
    li.push_back(r.lambda_i_nm);
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(ls);
  unique_sorted(li);
  if (ls.size() < 2 || li.size() < 2) throw_parse("scan must cover at least 2 points per axis");
  if (ls.size() * li.size() != recs.size())
    throw_parse("ragged scan: " + std::to_string(recs.size()) + " points do not form a " +
                std::to_string(ls.size()) + " x " + std::to_string(li.size()) + " rectangle");

  std::vector<double> rate(recs.size(), 0.0);
  std::vector<char> seen(recs.size(), 0);
  for (const auto& r : recs) {
    const auto is = static_cast<std::size_t>(std::lower_bound(ls.begin(), ls.end(), r.lambda_s_nm) - ls.begin());
    const auto ii = static_cast<std::size_t>(std::lower_bound(li.begin(), li.end(), r.lambda_i_nm) - li.begin());
    const std::size_t k = is * li.size() + ii;
    if (seen[k]) throw_parse("ragged scan: duplicate point at (" + format_double(r.lambda_s_nm) +
                             ", " + format_double(r.lambda_i_nm) + ") nm");
    seen[k] = 1;
    rate[k] = static_cast<double>(r.coincidences) / r.integration_time_s;
  }

  IngestResult out;
  std::vector<double> sorted = rate;
  const auto q = static_cast<std::size_t>(0.05 * static_cast<double>(sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q), sorted.end());
  out.dark_rate_estimate = sorted[q];

  auto& g = out.grid;
  g.meta.intensity_only = true;
  g.meta.center_nm =
      center_nm.value_or(0.25 * (ls.front() + ls.back() + li.front() + li.back()));
  g.meta.sellmeier_name = "measured";
  g.meta.xi_deg = std::nan("");
  g.meta.grid_hash = hash_hex(scan_csv_text(recs, {}));
  g.set_axes(ls, li);
  g.amplitude.resize(rate.size());
  for (std::size_t k = 0; k < rate.size(); ++k) {
    double s = rate[k] - out.dark_rate_estimate;
    if (s < 0.0) {
      ++out.clipped_points;
      s = 0.0;
    }
    g.amplitude[k] = std::sqrt(s);
  }
  g.normalize();
  return out;
}

IngestResult ingest_scan_file(const std::filesystem::path& path, std::optional<double> center_nm) {
  return ingest_scan(read_scan_csv(path), center_nm);
}

}  // namespace spdc
