#include "spdc/driver.hpp"

#include "spdc/error.hpp"
#include "spdc/grid_io.hpp"
#include "spdc/hash.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace spdc {

using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

struct Setup {
  CrystalConfig crystal;
  TiltConfig tilt;
  std::string hash;
  fs::path out;
};

Setup prepare(const RunConfig& cfg) {
  validate(cfg);
  Setup s;
  s.crystal = build_crystal(cfg);
  s.tilt = build_tilt(cfg, s.crystal);
  s.hash = config_hash(cfg);
  s.out = cfg.output_dir;
  return s;
}

std::string xi_tag(double xi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", xi == 0.0 ? 0.0 : xi);
  return buf;
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string line(const std::string& k, const std::string& v) { return k + ": " + v + "\n"; }

ordered_json point_json(const SweepPoint& p) {
  ordered_json j;
  j["xi_deg"] = p.xi_deg;
  j["ok"] = p.ok;
  if (!p.ok) {
    j["error"] = p.error;
    return j;
  }
  j["regime"] = to_string(p.regime);
  j["r"] = num(p.r);
  j["metric"] = num(p.metric);
  j["entropy_bits"] = num(p.entropy_bits);
  j["K"] = num(p.schmidt_number);
  j["fwhm_s_nm"] = num(p.fwhm_s_nm);
  j["fwhm_i_nm"] = num(p.fwhm_i_nm);
  return j;
}

const std::vector<std::string> kScanAssumptions = {
    "monochromator bandpass modeled as a Gaussian; the 0.2 nm default FWHM is an assumption, "
    "not a measured value",
    "integration time per point defaults to 1 s (assumption)",
    "accidental coincidences folded into one flat dark rate"};

}  // namespace

std::string analysis_report(const JointSpectrumGrid& g, const RegimeThresholds& thresholds,
                            const std::string& cfg_hash, const std::string& source,
                            const std::vector<std::string>& assumptions,
                            const std::string& extra_json) {
  ordered_json j;
  j["config_hash"] = cfg_hash;
  j["grid_hash"] = g.meta.grid_hash;
  j["source"] = source;
  j["sellmeier"] = g.meta.sellmeier_name;
  j["xi_deg"] = num(g.meta.xi_deg);
  j["intensity_only"] = g.meta.intensity_only;
  j["grid"] = {{"n_s", g.n_s()},
               {"n_i", g.n_i()},
               {"lambda_s_range_nm", {g.lambda_s_nm.front(), g.lambda_s_nm.back()}},
               {"lambda_i_range_nm", {g.lambda_i_nm.front(), g.lambda_i_nm.back()}},
               {"center_nm", g.meta.center_nm}};

  const auto fit = fit_gaussian(g);
  j["fit"] = {{"model", "S = A exp(-a ws^2 - b wi^2 - 2 c ws wi), detunings in rad/fs"},
              {"mask_threshold", kFitMaskThreshold},
              {"A", fit.amplitude},
              {"a_fs2", fit.a},
              {"b_fs2", fit.b},
              {"c_fs2", fit.c},
              {"r", fit.r},
              {"metric_c2_over_ab", fit.metric},
              {"overlap", fit.overlap},
              {"fitted_nodes", fit.fitted_nodes},
              {"iterations", fit.iterations}};
  const Regime regime = classify_regime(fit, thresholds);
  j["regime"] = to_string(regime);
  j["thresholds"] = {{"r_min", thresholds.r_min}, {"metric_max", thresholds.metric_max}};

  const auto sch = schmidt_decompose(g);
  ordered_json coeffs = ordered_json::array();
  for (std::size_t k = 0; k < std::min<std::size_t>(8, sch.coefficients.size()); ++k)
    coeffs.push_back(sch.coefficients[k]);
  j["schmidt"] = {{"entropy_bits", sch.entropy_bits},
                  {"K", sch.schmidt_number},
                  {"leading_coefficients", coeffs},
                  {"approximate", sch.approximate}};

  const auto m = marginals_unchecked(g);
  ordered_json warnings = ordered_json::array();
  j["marginals"] = {{"fwhm_s_nm", num(m.fwhm_s_nm)},
                    {"fwhm_i_nm", num(m.fwhm_i_nm)},
                    {"edge_s", m.edge_s},
                    {"edge_i", m.edge_i}};
  if (m.edge_s > kEdgeThreshold || m.edge_i > kEdgeThreshold)
    warnings.push_back("marginal support reaches the grid edge; widths may be underestimated");
  try {
    j["temporal_width_fs"] = temporal_correlation_width(g);
  } catch (const Error& e) {
    j["temporal_width_fs"] = nullptr;
    warnings.push_back(std::string("temporal width unavailable: ") + e.what());
  }
  ordered_json as = ordered_json::array();
  for (const auto& a : assumptions) as.push_back(a);
  if (g.meta.intensity_only)
    as.push_back("amplitude taken as sqrt(S) with zero phase; Schmidt values and temporal width "
                 "are approximate");
  j["assumptions"] = as;
  j["warnings"] = warnings;
  if (!extra_json.empty()) {
    const auto extra = ordered_json::parse(extra_json);
    for (const auto& [k, v] : extra.items()) j[k] = v;
  }
  return j.dump(2) + "\n";
}

CommandOutput cmd_jsa(const RunConfig& cfg) {
  const auto s = prepare(cfg);
  const auto g = compute_jsa(s.crystal, cfg.pump, s.tilt, cfg.grid);
  const auto stem = s.out / grid_file_stem(g);
  CommandOutput out;
  fs::path csv = stem, ppm = stem, meta = stem;
  csv += ".csv";
  ppm += ".ppm";
  meta += ".json";
  write_grid_csv(csv, g, s.hash);
  write_text_file(ppm, heatmap_ppm(g, s.hash));
  write_text_file(meta, grid_metadata_json(g, s.hash));
  out.files = {csv, ppm, meta};
  const auto m = marginals_unchecked(g);
  out.summary = line("config_hash", s.hash) + line("grid_hash", g.meta.grid_hash) +
                line("xi_deg", format_double(g.meta.xi_deg)) +
                line("theta_pm_deg", format_double(s.crystal.theta_pm_deg)) +
                line("fwhm_s_nm", format_double(m.fwhm_s_nm)) +
                line("fwhm_i_nm", format_double(m.fwhm_i_nm));
  return out;
}

CommandOutput cmd_analyze(const fs::path& input, const RunConfig& cfg) {
  validate(cfg);
  const std::string hash = config_hash(cfg);
  std::string text;
  try {
    text = read_text_file(input);
  } catch (const Error&) {
    throw_config("input", "cannot read " + input.string());
  }
  std::string first;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string l = text.substr(pos, end - pos);
      if (!l.empty() && l.back() == '\r') l.pop_back();
      pos = end + 1;
      if (!l.empty() && l[0] != '#') {
        first = l;
        break;
      }
    }
  }
  if (first.empty()) throw_parse("input is empty: " + input.string());

  CommandOutput out;
  std::string report;
  const std::string input_hash = hash_hex(text);
  ordered_json extra;
  extra["input_hash"] = input_hash;
  if (first == kScanCsvHeader) {
    auto ing = ingest_scan(parse_scan_csv(text));
    extra["scan"] = {{"points", ing.grid.n_s() * ing.grid.n_i()},
                     {"dark_rate_estimate", ing.dark_rate_estimate},
                     {"dark_estimator", "5% quantile of coincidence rate"},
                     {"clipped_points", ing.clipped_points}};
    if (ing.clipped_points > 0)
      out.warnings.push_back(std::to_string(ing.clipped_points) +
                             " points clipped to 0 after dark subtraction");
    report = analysis_report(ing.grid, cfg.thresholds, hash, input.filename().string(),
                             kScanAssumptions, extra.dump());
  } else if (first.rfind("lambda_s_nm,", 0) == 0) {
    const auto g = parse_grid_csv(text);
    report = analysis_report(g, cfg.thresholds, hash, input.filename().string(), {}, extra.dump());
  } else {
    throw_parse("unrecognized input: expected a grid CSV or a scan CSV header");
  }
  const auto path = fs::path(cfg.output_dir) / ("analysis_" + input.stem().string() + "_" +
                                                input_hash.substr(0, 8) + ".json");
  write_text_file(path, report);
  out.files = {path};
  const auto j = ordered_json::parse(report);
  out.summary = line("config_hash", hash) + line("regime", j["regime"].get<std::string>()) +
                line("r", j["fit"]["r"].dump()) +
                line("metric", j["fit"]["metric_c2_over_ab"].dump()) +
                line("entropy_bits", j["schmidt"]["entropy_bits"].dump()) +
                line("intensity_only", j["intensity_only"].dump());
  return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  const auto s = prepare(cfg);
  const auto res = sweep_xi(cfg.sweep.xi_min_deg, cfg.sweep.xi_max_deg, cfg.sweep.steps,
                            s.crystal, cfg.pump, cfg.grid, s.tilt);
  CommandOutput out;
  const auto csv = s.out / ("sweep_" + s.hash + ".csv");
  write_text_file(csv, sweep_csv_text(res, "spdc sweep config_hash=" + s.hash));

  ordered_json j;
  j["config_hash"] = s.hash;
  j["xi_uncorrelated_deg"] = res.xi_uncorrelated ? num(*res.xi_uncorrelated) : ordered_json(nullptr);
  j["minimum_interior"] = res.minimum_interior;
  ordered_json pts = ordered_json::array();
  std::string regimes;
  for (const auto& p : res.points) {
    pts.push_back(point_json(p));
    if (!regimes.empty()) regimes += ' ';
    regimes += p.ok ? to_string(p.regime) : "failed";
    if (!p.ok) out.warnings.push_back("xi=" + format_double(p.xi_deg) + " failed: " + p.error);
  }
  j["points"] = pts;
  const auto summary = s.out / ("sweep_" + s.hash + ".json");
  write_text_file(summary, j.dump(2) + "\n");
  if (!res.minimum_interior)
    out.warnings.push_back("metric minimum lies on the sweep boundary; widen the range");
  out.files = {csv, summary};
  out.summary = line("config_hash", s.hash) + line("points", std::to_string(res.points.size())) +
                line("xi_uncorrelated_deg",
                     res.xi_uncorrelated ? format_double(*res.xi_uncorrelated) : "none") +
                line("regimes", regimes);
  return out;
}

CommandOutput cmd_scan(const RunConfig& cfg) {
  const auto s = prepare(cfg);
  const auto g = compute_jsa(s.crystal, cfg.pump, s.tilt, cfg.grid);
  const auto sc = build_scan(cfg);
  CommandOutput out;
  out.warnings = sc.warnings();
  const auto recs = simulate_scan(g, sc);
  const auto path = s.out / ("scan_xi" + xi_tag(g.meta.xi_deg) + "_seed" +
                             std::to_string(sc.rng_seed) + "_" + s.hash + ".csv");
  std::string comment = "spdc scan config_hash=" + s.hash + " grid_hash=" + g.meta.grid_hash +
                        " seed=" + std::to_string(sc.rng_seed) +
                        " bandpass_fwhm_nm=" + format_double(sc.bandpass_fwhm_nm) +
                        " (assumed) t_s=" + format_double(sc.integration_time_s) + " (assumed)";
  write_scan_csv(path, recs, comment);
  out.files = {path};
  out.summary = line("config_hash", s.hash) + line("grid_hash", g.meta.grid_hash) +
                line("points", std::to_string(recs.size())) +
                line("seed", std::to_string(sc.rng_seed));
  return out;
}

CommandOutput cmd_solve_xi(const RunConfig& cfg) {
  const auto s = prepare(cfg);
  const auto res = solve_xi_for_regime(cfg.solve, s.crystal, cfg.pump, cfg.grid, s.tilt);
  ordered_json j;
  j["config_hash"] = s.hash;
  j["target"] = to_string(cfg.solve.target);
  if (cfg.solve.target == SolveTarget::RValue) j["r_target"] = cfg.solve.r_target;
  j["xi_deg"] = res.xi_deg;
  j["tolerance_deg"] = cfg.solve.tolerance_deg;
  j["at"] = point_json(res.at);
  ordered_json pre = ordered_json::array();
  for (const auto& p : res.prescan) pre.push_back(point_json(p));
  j["prescan"] = pre;
  CommandOutput out;
  const auto path = s.out / (std::string("solve_") + to_string(cfg.solve.target) + "_" + s.hash + ".json");
  write_text_file(path, j.dump(2) + "\n");
  out.files = {path};
  out.summary = line("config_hash", s.hash) + line("target", to_string(cfg.solve.target)) +
                line("xi_deg", format_double(res.xi_deg)) +
                line("regime", res.at.ok ? to_string(res.at.regime) : "failed");
  if (!res.at.ok) out.warnings.push_back("evaluation at the solution failed: " + res.at.error);
  return out;
}

}  // namespace spdc
