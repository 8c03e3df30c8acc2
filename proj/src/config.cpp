#include "spdc/config.hpp"

#include "spdc/error.hpp"
#include "spdc/grid_io.hpp"
#include "spdc/hash.hpp"

#include <json.hpp>

#include <cstdlib>
#include <initializer_list>
#include <set>

namespace spdc {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw_config(where.empty() ? "config" : where, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw_config(where.empty() ? k : where + "." + k, "unknown key");
}

std::string path_of(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw_config(path_of(where, key), "must be a number");
  return v.get<double>();
}

std::optional<double> get_optional(const json& j, const std::string& where, const char* key,
                                   std::optional<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  return get_number(j, where, key, 0.0);
}

int get_int(const json& j, const std::string& where, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw_config(path_of(where, key), "must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw_config(path_of(where, key), "must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) throw_config(path_of(where, key), "must be a string");
  return v.get<std::string>();
}

std::optional<WavelengthRange> get_range(const json& j, const std::string& where, const char* key,
                                         std::optional<WavelengthRange> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw_config(path_of(where, key), "must be [lo_nm, hi_nm]");
  return WavelengthRange{v[0].get<double>(), v[1].get<double>()};
}

json range_json(const std::optional<WavelengthRange>& r) {
  return r ? json::array({r->lo_nm, r->hi_nm}) : json(nullptr);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const char* kWaveNames[3] = {"pump", "signal", "idler"};

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw_parse(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "", {"crystal", "pump", "tilt", "grid", "scan", "sweep", "solve", "regime",
                     "output_dir", "rng_seed"});
  RunConfig c;

  if (j.contains("crystal")) {
    const auto& s = j["crystal"];
    const std::string w = "crystal";
    check_keys(s, w, {"sellmeier_file", "length_mm", "lambda_p0_nm", "theta_pm_deg",
                      "swap_signal_idler", "walkoff_sign"});
    c.sellmeier_file = get_string(s, w, "sellmeier_file", c.sellmeier_file);
    c.length_mm = get_number(s, w, "length_mm", c.length_mm);
    c.lambda_p0_nm = get_number(s, w, "lambda_p0_nm", c.lambda_p0_nm);
    c.theta_pm_deg = get_optional(s, w, "theta_pm_deg", c.theta_pm_deg);
    c.swap_signal_idler = get_bool(s, w, "swap_signal_idler", c.swap_signal_idler);
    if (s.contains("walkoff_sign")) {
      const auto& v = s["walkoff_sign"];
      if (!v.is_array() || v.size() != 3)
        throw_config("crystal.walkoff_sign", "must be [pump, signal, idler] of +1/-1");
      for (int k = 0; k < 3; ++k) {
        if (!v[k].is_number() || std::abs(std::abs(v[k].get<double>()) - 1.0) > 0)
          throw_config("crystal.walkoff_sign", "entries must be +1 or -1");
        c.walkoff_sign[k] = v[k].get<double>();
      }
    }
  }
  if (j.contains("pump")) {
    const auto& s = j["pump"];
    check_keys(s, "pump", {"lambda0_nm", "fwhm_nm"});
    c.pump.lambda0_nm = get_number(s, "pump", "lambda0_nm", c.pump.lambda0_nm);
    c.pump.fwhm_nm = get_number(s, "pump", "fwhm_nm", c.pump.fwhm_nm);
  }
  if (j.contains("tilt")) {
    const auto& s = j["tilt"];
    check_keys(s, "tilt", {"xi_deg", "applied_to", "grating"});
    if (s.contains("xi_deg") && s.contains("grating"))
      throw_config("tilt.grating", "give either xi_deg or grating, not both");
    c.tilt.xi_deg = get_number(s, "tilt", "xi_deg", c.tilt.xi_deg);
    if (s.contains("applied_to")) {
      const auto& v = s["applied_to"];
      if (!v.is_array()) throw_config("tilt.applied_to", "must be a list of wave names");
      for (bool& b : c.tilt.applied_to) b = false;
      for (const auto& e : v) {
        bool found = false;
        for (int k = 0; k < 3; ++k)
          if (e.is_string() && e.get<std::string>() == kWaveNames[k]) c.tilt.applied_to[k] = found = true;
        if (!found) throw_config("tilt.applied_to", "entries must be pump, signal or idler");
      }
    }
    if (s.contains("grating")) {
      const auto& g = s["grating"];
      const std::string w = "tilt.grating";
      check_keys(g, w, {"groove_density_per_mm", "incidence_deg", "diffraction_order"});
      GratingSpec gs;
      gs.groove_density_per_mm = get_number(g, w, "groove_density_per_mm", 0.0);
      gs.incidence_deg = get_number(g, w, "incidence_deg", 0.0);
      gs.diffraction_order = get_int(g, w, "diffraction_order", 1);
      c.grating = gs;
    }
  }
  if (j.contains("grid")) {
    const auto& s = j["grid"];
    check_keys(s, "grid", {"n_s", "n_i", "span_s_nm", "span_i_nm"});
    c.grid.n_s = get_int(s, "grid", "n_s", c.grid.n_s);
    c.grid.n_i = get_int(s, "grid", "n_i", c.grid.n_i);
    c.grid.span_s_nm = get_optional(s, "grid", "span_s_nm", c.grid.span_s_nm);
    c.grid.span_i_nm = get_optional(s, "grid", "span_i_nm", c.grid.span_i_nm);
  }
  if (j.contains("scan")) {
    const auto& s = j["scan"];
    check_keys(s, "scan", {"bandpass_fwhm_nm", "step_s_nm", "step_i_nm", "range_s_nm",
                           "range_i_nm", "pair_rate_peak", "integration_time_s",
                           "dark_coincidence_rate", "singles_efficiency"});
    auto& sc = c.scan;
    sc.bandpass_fwhm_nm = get_number(s, "scan", "bandpass_fwhm_nm", sc.bandpass_fwhm_nm);
    sc.step_s_nm = get_number(s, "scan", "step_s_nm", sc.step_s_nm);
    sc.step_i_nm = get_number(s, "scan", "step_i_nm", sc.step_i_nm);
    sc.range_s = get_range(s, "scan", "range_s_nm", sc.range_s);
    sc.range_i = get_range(s, "scan", "range_i_nm", sc.range_i);
    sc.pair_rate_peak = get_number(s, "scan", "pair_rate_peak", sc.pair_rate_peak);
    sc.integration_time_s = get_number(s, "scan", "integration_time_s", sc.integration_time_s);
    sc.dark_coincidence_rate =
        get_number(s, "scan", "dark_coincidence_rate", sc.dark_coincidence_rate);
    sc.singles_efficiency = get_number(s, "scan", "singles_efficiency", sc.singles_efficiency);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, "sweep", {"xi_min", "xi_max", "steps"});
    c.sweep.xi_min_deg = get_number(s, "sweep", "xi_min", c.sweep.xi_min_deg);
    c.sweep.xi_max_deg = get_number(s, "sweep", "xi_max", c.sweep.xi_max_deg);
    c.sweep.steps = get_int(s, "sweep", "steps", c.sweep.steps);
  }
  if (j.contains("solve")) {
    const auto& s = j["solve"];
    check_keys(s, "solve", {"target", "r_target", "xi_min", "xi_max", "tolerance_deg",
                            "prescan_step_deg"});
    auto& r = c.solve;
    if (s.contains("target")) r.target = parse_solve_target(get_string(s, "solve", "target", ""));
    r.r_target = get_number(s, "solve", "r_target", r.r_target);
    r.lo_deg = get_number(s, "solve", "xi_min", r.lo_deg);
    r.hi_deg = get_number(s, "solve", "xi_max", r.hi_deg);
    r.tolerance_deg = get_number(s, "solve", "tolerance_deg", r.tolerance_deg);
    r.prescan_step_deg = get_number(s, "solve", "prescan_step_deg", r.prescan_step_deg);
  }
  if (j.contains("regime")) {
    const auto& s = j["regime"];
    check_keys(s, "regime", {"r_min", "metric_max"});
    c.thresholds.r_min = get_number(s, "regime", "r_min", c.thresholds.r_min);
    c.thresholds.metric_max = get_number(s, "regime", "metric_max", c.thresholds.metric_max);
  }
  c.output_dir = get_string(j, "", "output_dir", c.output_dir);
  if (j.contains("rng_seed")) {
    const auto& v = j["rng_seed"];
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw_config("rng_seed", "must be a non-negative integer");
    c.rng_seed = v.get<std::uint64_t>();
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    throw_config("--config", "cannot read " + path.string());
  }
  return parse_run_config(text);
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("SPDC_PRESET_DIR"); env && *env) return env;
  return SPDC_DEFAULT_PRESET_DIR;
}

std::filesystem::path preset_path(const std::string& name) {
  if (name.empty() || name.find_first_of("/\\.") != std::string::npos)
    throw_config("--preset", "invalid preset name '" + name + "'");
  auto p = preset_directory() / (name + ".json");
  if (!std::filesystem::exists(p))
    throw_config("--preset", "no preset '" + name + "' in " + preset_directory().string());
  return p;
}

void validate(const RunConfig& c) {
  if (!(c.length_mm > 0.0)) throw_config("crystal.length_mm", "must be > 0");
  if (!(c.lambda_p0_nm > 0.0)) throw_config("crystal.lambda_p0_nm", "must be > 0");
  if (c.theta_pm_deg && !(*c.theta_pm_deg >= 0.0 && *c.theta_pm_deg <= 90.0))
    throw_config("crystal.theta_pm_deg", "must lie in [0, 90]");
  c.pump.validate();
  if (!(std::abs(c.tilt.xi_deg) < 90.0)) throw_config("tilt.xi_deg", "must satisfy |xi| < 90");
  if (c.grating) {
    if (!(c.grating->groove_density_per_mm > 0.0))
      throw_config("tilt.grating.groove_density_per_mm", "must be > 0");
    if (c.grating->diffraction_order == 0)
      throw_config("tilt.grating.diffraction_order", "must be non-zero");
  }
  c.grid.validate();
  c.scan.validate();
  if (c.sweep.steps < 2) throw_config("sweep.steps", "must be >= 2");
  if (!(c.sweep.xi_max_deg > c.sweep.xi_min_deg))
    throw_config("sweep.xi_max", "sweep range is empty (xi_max <= xi_min)");
  if (!(c.sweep.xi_min_deg > -90.0 && c.sweep.xi_max_deg < 90.0))
    throw_config("sweep.xi_min", "range must lie within (-90, 90)");
  if (!(c.thresholds.r_min > 0.0 && c.thresholds.r_min < 1.0))
    throw_config("regime.r_min", "must lie in (0, 1)");
  if (!(c.thresholds.metric_max > 0.0)) throw_config("regime.metric_max", "must be > 0");
  if (c.output_dir.empty()) throw_config("output_dir", "must not be empty");
}

std::string canonical_config_json(const RunConfig& c) {
  json j;
  j["crystal"] = {{"sellmeier_file", c.sellmeier_file},
                  {"length_mm", c.length_mm},
                  {"lambda_p0_nm", c.lambda_p0_nm},
                  {"theta_pm_deg", opt_json(c.theta_pm_deg)},
                  {"swap_signal_idler", c.swap_signal_idler},
                  {"walkoff_sign", c.walkoff_sign}};
  j["pump"] = {{"lambda0_nm", c.pump.lambda0_nm}, {"fwhm_nm", c.pump.fwhm_nm}};
  json applied = json::array();
  for (int k = 0; k < 3; ++k)
    if (c.tilt.applied_to[k]) applied.push_back(kWaveNames[k]);
  j["tilt"] = {{"xi_deg", c.tilt.xi_deg}, {"applied_to", applied}};
  if (c.grating)
    j["tilt"]["grating"] = {{"groove_density_per_mm", c.grating->groove_density_per_mm},
                            {"incidence_deg", c.grating->incidence_deg},
                            {"diffraction_order", c.grating->diffraction_order}};
  j["grid"] = {{"n_s", c.grid.n_s},
               {"n_i", c.grid.n_i},
               {"span_s_nm", opt_json(c.grid.span_s_nm)},
               {"span_i_nm", opt_json(c.grid.span_i_nm)}};
  const auto& s = c.scan;
  j["scan"] = {{"bandpass_fwhm_nm", s.bandpass_fwhm_nm},
               {"step_s_nm", s.step_s_nm},
               {"step_i_nm", s.step_i_nm},
               {"range_s_nm", range_json(s.range_s)},
               {"range_i_nm", range_json(s.range_i)},
               {"pair_rate_peak", s.pair_rate_peak},
               {"integration_time_s", s.integration_time_s},
               {"dark_coincidence_rate", s.dark_coincidence_rate},
               {"singles_efficiency", s.singles_efficiency}};
  j["sweep"] = {{"xi_min", c.sweep.xi_min_deg},
                {"xi_max", c.sweep.xi_max_deg},
                {"steps", c.sweep.steps}};
  j["solve"] = {{"target", to_string(c.solve.target)},
                {"r_target", c.solve.r_target},
                {"xi_min", c.solve.lo_deg},
                {"xi_max", c.solve.hi_deg},
                {"tolerance_deg", c.solve.tolerance_deg},
                {"prescan_step_deg", c.solve.prescan_step_deg}};
  j["regime"] = {{"r_min", c.thresholds.r_min}, {"metric_max", c.thresholds.metric_max}};
  j["rng_seed"] = c.rng_seed;
  return j.dump();  // std::map-backed object: keys sorted, so the text is canonical
}

std::string config_hash(const RunConfig& c) { return hash_hex(canonical_config_json(c)); }

CrystalConfig build_crystal(const RunConfig& c) {
  auto material = c.sellmeier_file.empty()
                      ? SellmeierModel::default_bbo()
                      : std::make_shared<const SellmeierModel>(SellmeierModel::load(c.sellmeier_file));
  PolarizationAssignment pol;
  if (c.swap_signal_idler) pol = pol.swapped();
  CrystalConfig crystal;
  if (c.theta_pm_deg) {
    crystal.material = material;
    crystal.length_mm = c.length_mm;
    crystal.lambda_p0_nm = c.lambda_p0_nm;
    crystal.theta_pm_deg = *c.theta_pm_deg;
    crystal.pol = pol;
  } else {
    crystal = make_phase_matched_crystal(material, c.length_mm, c.lambda_p0_nm, pol);
  }
  crystal.walkoff_sign = c.walkoff_sign;
  crystal.validate();
  return crystal;
}

TiltConfig build_tilt(const RunConfig& c, const CrystalConfig& crystal) {
  TiltConfig t = c.tilt;
  if (c.grating) t.xi_deg = tilt_from_grating(*c.grating, crystal.pump_wavelength());
  return t;
}

ScanConfig build_scan(const RunConfig& c) {
  ScanConfig s = c.scan;
  s.rng_seed = c.rng_seed;
  return s;
}

}  // namespace spdc
