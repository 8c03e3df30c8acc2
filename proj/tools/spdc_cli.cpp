// Command-line front end; talks to the library only through the C interface.
#include "spdc/spdc.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> xi;
  std::string input;
};

int report_failure(spdc_status s) {
  std::fprintf(stderr, "%s\n", spdc_last_error_json());
  return spdc_exit_code(s);
}

int usage_error(const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += c;
  }
  std::fprintf(stderr,
               "{\"error\":{\"kind\":\"config\",\"field\":\"argv\",\"message\":\"%s\"},"
               "\"exit_code\":2}\n",
               escaped.c_str());
  return 2;
}

int run(const std::string& command, const Options& o) {
  spdc_config* cfg = nullptr;
  spdc_status s;
  if (!o.config.empty() && !o.preset.empty())
    return usage_error("give either --config or --preset, not both");
  if (!o.config.empty())
    s = spdc_config_load(o.config.c_str(), &cfg);
  else if (!o.preset.empty())
    s = spdc_config_preset(o.preset.c_str(), &cfg);
  else
    s = spdc_config_default(&cfg);
  if (s != SPDC_OK) return report_failure(s);

  if (s == SPDC_OK && o.seed) s = spdc_config_set_seed(cfg, *o.seed);
  if (s == SPDC_OK && o.out) s = spdc_config_set_output_dir(cfg, o.out->c_str());
  if (s == SPDC_OK && o.xi) s = spdc_config_set_xi(cfg, *o.xi);
  spdc_result* res = nullptr;
  if (s == SPDC_OK) s = spdc_run(command.c_str(), cfg, o.input.c_str(), &res);
  spdc_config_free(cfg);
  if (s != SPDC_OK) return report_failure(s);

  std::fputs(spdc_result_summary(res), stdout);
  for (size_t i = 0; i < spdc_result_file_count(res); ++i)
    std::printf("file: %s\n", spdc_result_file(res, i));
  for (size_t i = 0; i < spdc_result_warning_count(res); ++i)
    std::fprintf(stderr, "warning: %s\n", spdc_result_warning(res, i));
  spdc_result_free(res);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPDC joint spectral amplitude toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spdc_version());

  Options o;
  std::string chosen;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run config");
    sub->add_option("--preset", o.preset, "shipped preset (fig3a, fig3c, fig3e, fig3g, fig4)");
    sub->add_option("--seed", o.seed, "RNG seed (overrides rng_seed)");
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--xi", o.xi, "tilt angle in degrees (overrides tilt)");
    sub->callback([&chosen, sub] { chosen = sub->get_name(); });
  };
  add_common(app.add_subcommand("jsa", "compute the joint spectrum; writes grid CSV, heatmap, metadata"));
  auto* analyze = app.add_subcommand("analyze", "fit and Schmidt-analyze a grid or scan CSV");
  add_common(analyze);
  analyze->add_option("input", o.input, "grid CSV or scan CSV")->required();
  add_common(app.add_subcommand("sweep", "sweep the tilt angle; writes the sweep CSV"));
  add_common(app.add_subcommand("scan", "simulate a two-monochromator coincidence scan"));
  add_common(app.add_subcommand("solve-xi", "solve for the tilt giving a target regime"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }
  return run(chosen, o);
}
