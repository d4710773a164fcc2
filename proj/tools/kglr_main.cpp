#include "kglr/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Spectral Klein-Gordon solver and integrator benchmark harness"};
  app.require_subcommand(1);

  kglr::CliCommand cmd;
  std::string config;
  std::string out_dir = "out";
  std::string cache_dir;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "experiment config file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for CSV files");
    sub->add_option("--set", cmd.overrides, "config override key=value (repeatable)");
    sub->add_option("--jobs", cmd.jobs, "parallel sweep jobs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the config seed")->trigger_on_parse();
    sub->add_option("--cache-dir", cache_dir,
                    "reference-solution cache directory (default <out>/cache, "
                    "or KGLR_CACHE_DIR)");
    sub->add_flag("--print-config", cmd.print_config,
                  "print the effective config and exit without running");
  };

  CLI::App* sub_solve = app.add_subcommand("solve", "run one trajectory per method");
  CLI::App* sub_conv = app.add_subcommand("convergence", "error-vs-h sweep");
  CLI::App* sub_eff = app.add_subcommand("efficiency", "error-vs-wall-time sweep");
  CLI::App* sub_drift = app.add_subcommand("energy-drift", "long-time energy drift series");
  CLI::App* sub_rev = app.add_subcommand("reversibility", "forward/backward recursion defect");
  CLI::App* sub_self = app.add_subcommand("selftest", "built-in sanity suite");
  for (CLI::App* sub : {sub_solve, sub_conv, sub_eff, sub_drift, sub_rev})
    add_common(sub, true);
  add_common(sub_self, false);

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  cmd.verb = chosen->get_name();
  cmd.config_path = config;
  cmd.output_dir = out_dir;
  if (chosen->count("--seed")) cmd.seed = seed;
  if (!cache_dir.empty()) {
    cmd.cache_dir = cache_dir;
  } else if (const char* env = std::getenv("KGLR_CACHE_DIR")) {
    cmd.cache_dir = env;
  }
  return kglr::run_command(cmd);
}
