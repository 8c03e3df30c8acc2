#include "spdc/spdc.h"

#include "spdc/driver.hpp"
#include "spdc/error.hpp"
#include "spdc/grid_io.hpp"
#include "spdc/hash.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>

struct spdc_config {
  spdc::RunConfig cfg;
};

struct spdc_grid {
  spdc::JointSpectrumGrid grid;
  spdc::RegimeThresholds thresholds;
};

struct spdc_result {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::string summary;
};

namespace {

struct LastError {
  std::string message;
  std::string field;
  std::string json;
};

thread_local LastError g_error;

spdc_status status_of(spdc::ErrorKind k) {
  switch (k) {
    case spdc::ErrorKind::Config: return SPDC_ERR_CONFIG;
    case spdc::ErrorKind::Parse: return SPDC_ERR_PARSE;
    case spdc::ErrorKind::Domain: return SPDC_ERR_DOMAIN;
    case spdc::ErrorKind::Numeric: return SPDC_ERR_NUMERIC;
    case spdc::ErrorKind::Io: return SPDC_ERR_IO;
  }
  return SPDC_ERR_INTERNAL;
}

spdc_status fail(spdc_status s, std::string message, std::string field = {}) {
  g_error.message = std::move(message);
  g_error.field = std::move(field);
  nlohmann::ordered_json j;
  j["error"] = {{"kind", spdc_status_name(s)},
                {"field", g_error.field.empty() ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(g_error.field)},
                {"message", g_error.message}};
  j["exit_code"] = spdc_exit_code(s);
  g_error.json = j.dump();
  return s;
}

template <class F>
spdc_status guarded(F&& f) {
  g_error = {};
  try {
    f();
    return SPDC_OK;
  } catch (const spdc::Error& e) {
    return fail(status_of(e.kind()), e.what(), e.field());
  } catch (const std::bad_alloc&) {
    return fail(SPDC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPDC_ERR_INTERNAL, e.what());
  }
}

spdc_status null_arg(const char* name) {
  return fail(SPDC_ERR_ARGUMENT, std::string(name) + " is null", name);
}

}  // namespace

extern "C" {

const char* spdc_version(void) { return "1.0.0"; }

int spdc_exit_code(spdc_status s) {
  switch (s) {
    case SPDC_OK: return 0;
    case SPDC_ERR_CONFIG:
    case SPDC_ERR_PARSE:
    case SPDC_ERR_IO:
    case SPDC_ERR_ARGUMENT: return 2;
    default: return 3;
  }
}

const char* spdc_status_name(spdc_status s) {
  switch (s) {
    case SPDC_OK: return "ok";
    case SPDC_ERR_CONFIG: return "config";
    case SPDC_ERR_PARSE: return "parse";
    case SPDC_ERR_DOMAIN: return "domain";
    case SPDC_ERR_NUMERIC: return "numeric";
    case SPDC_ERR_IO: return "io";
    case SPDC_ERR_ARGUMENT: return "argument";
    case SPDC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* spdc_last_error_message(void) { return g_error.message.c_str(); }
const char* spdc_last_error_field(void) { return g_error.field.c_str(); }
const char* spdc_last_error_json(void) { return g_error.json.c_str(); }

spdc_status spdc_config_default(spdc_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new spdc_config{}; });
}

spdc_status spdc_config_load(const char* path, spdc_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new spdc_config{spdc::load_run_config(path)}; });
}

spdc_status spdc_config_parse(const char* json_text, spdc_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new spdc_config{spdc::parse_run_config(json_text)}; });
}

spdc_status spdc_config_preset(const char* name, spdc_config** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new spdc_config{spdc::load_run_config(spdc::preset_path(name))}; });
}

spdc_status spdc_config_set_seed(spdc_config* cfg, uint64_t seed) {
  if (!cfg) return null_arg("cfg");
  cfg->cfg.rng_seed = seed;
  return guarded([] {});
}

spdc_status spdc_config_set_output_dir(spdc_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir || !*dir) return fail(SPDC_ERR_CONFIG, "output_dir: must not be empty", "output_dir");
  return guarded([&] { cfg->cfg.output_dir = dir; });
}

spdc_status spdc_config_set_xi(spdc_config* cfg, double xi_deg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    if (!(std::abs(xi_deg) < 90.0)) spdc::throw_config("tilt.xi_deg", "must satisfy |xi| < 90");
    cfg->cfg.tilt.xi_deg = xi_deg;
    cfg->cfg.grating.reset();
  });
}

spdc_status spdc_config_hash(const spdc_config* cfg, char* buf, size_t len) {
  if (!cfg) return null_arg("cfg");
  if (!buf) return null_arg("buf");
  std::string h;
  const auto s = guarded([&] { h = spdc::config_hash(cfg->cfg); });
  if (s != SPDC_OK) return s;
  if (len < h.size() + 1) return fail(SPDC_ERR_ARGUMENT, "buffer too small for the config hash", "len");
  std::memcpy(buf, h.c_str(), h.size() + 1);
  return SPDC_OK;
}

void spdc_config_free(spdc_config* cfg) { delete cfg; }

spdc_status spdc_grid_compute(const spdc_config* cfg, spdc_grid** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    spdc::validate(cfg->cfg);
    const auto crystal = spdc::build_crystal(cfg->cfg);
    const auto tilt = spdc::build_tilt(cfg->cfg, crystal);
    *out = new spdc_grid{spdc::compute_jsa(crystal, cfg->cfg.pump, tilt, cfg->cfg.grid),
                         cfg->cfg.thresholds};
  });
}

spdc_status spdc_grid_load(const char* path, spdc_grid** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new spdc_grid{spdc::read_grid_csv(path), {}}; });
}

spdc_status spdc_grid_shape(const spdc_grid* g, size_t* n_s, size_t* n_i) {
  if (!g) return null_arg("g");
  if (n_s) *n_s = g->grid.n_s();
  if (n_i) *n_i = g->grid.n_i();
  return guarded([] {});
}

spdc_status spdc_grid_copy(const spdc_grid* g, double* lambda_s, double* lambda_i,
                           double* intensity) {
  if (!g) return null_arg("g");
  const auto& G = g->grid;
  if (lambda_s) std::copy(G.lambda_s_nm.begin(), G.lambda_s_nm.end(), lambda_s);
  if (lambda_i) std::copy(G.lambda_i_nm.begin(), G.lambda_i_nm.end(), lambda_i);
  if (intensity) std::copy(G.intensity.begin(), G.intensity.end(), intensity);
  return guarded([] {});
}

spdc_status spdc_grid_analyze(const spdc_grid* g, spdc_analysis* out) {
  if (!g) return null_arg("g");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto fit = spdc::fit_gaussian(g->grid);
    const auto sch = spdc::schmidt_decompose(g->grid);
    const auto m = spdc::marginals_unchecked(g->grid);
    *out = spdc_analysis{fit.r,
                         fit.metric,
                         fit.overlap,
                         sch.entropy_bits,
                         sch.schmidt_number,
                         m.fwhm_s_nm,
                         m.fwhm_i_nm,
                         static_cast<int>(spdc::classify_regime(fit, g->thresholds)),
                         g->grid.meta.intensity_only ? 1 : 0};
  });
}

void spdc_grid_free(spdc_grid* g) { delete g; }

spdc_status spdc_run(const char* command, const spdc_config* cfg, const char* input,
                     spdc_result** out) {
  if (!command) return null_arg("command");
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    const std::string c = command;
    spdc::CommandOutput r;
    if (c == "jsa") {
      r = spdc::cmd_jsa(cfg->cfg);
    } else if (c == "analyze") {
      if (!input || !*input) spdc::throw_config("input", "analyze needs an input file");
      r = spdc::cmd_analyze(input, cfg->cfg);
    } else if (c == "sweep") {
      r = spdc::cmd_sweep(cfg->cfg);
    } else if (c == "scan") {
      r = spdc::cmd_scan(cfg->cfg);
    } else if (c == "solve-xi") {
      r = spdc::cmd_solve_xi(cfg->cfg);
    } else {
      spdc::throw_config("command", "unknown command '" + c + "'");
    }
    auto* res = new spdc_result;
    for (const auto& f : r.files) res->files.push_back(f.string());
    res->warnings = std::move(r.warnings);
    res->summary = std::move(r.summary);
    *out = res;
  });
}

size_t spdc_result_file_count(const spdc_result* r) { return r ? r->files.size() : 0; }
const char* spdc_result_file(const spdc_result* r, size_t i) {
  return r && i < r->files.size() ? r->files[i].c_str() : nullptr;
}
size_t spdc_result_warning_count(const spdc_result* r) { return r ? r->warnings.size() : 0; }
const char* spdc_result_warning(const spdc_result* r, size_t i) {
  return r && i < r->warnings.size() ? r->warnings[i].c_str() : nullptr;
}
const char* spdc_result_summary(const spdc_result* r) { return r ? r->summary.c_str() : ""; }
void spdc_result_free(spdc_result* r) { delete r; }

}  // extern "C"
