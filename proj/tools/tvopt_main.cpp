#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "tvopt/config.hpp"
#include "tvopt/runner.hpp"

namespace fs = std::filesystem;
using namespace tvopt;

namespace {

cli::ConfigFile load_config(const std::string& config_path,
                            const std::string& preset, long seed_override) {
  if (config_path.empty() && preset.empty())
    throw ConfigError("either --config or --preset is required");
  if (!config_path.empty() && !preset.empty())
    throw ConfigError("--config and --preset are mutually exclusive");
  cli::ConfigFile cfg = config_path.empty()
                            ? cli::preset_config(preset)
                            : cli::ConfigFile::parse_file(config_path);
  if (seed_override >= 0)
    cli::override_seeds(cfg, static_cast<std::uint64_t>(seed_override));
  return cfg;
}

fs::path pick_out_dir(const cli::ConfigFile& cfg, const std::string& out_flag,
                      const std::string& fallback_name) {
  if (!out_flag.empty()) return cli::resolve_out_dir(out_flag);
  for (const auto& e : cfg.entries)
    if (e.section == "output" && e.key == "directory")
      return cli::resolve_out_dir(e.value);
  return cli::resolve_out_dir(fallback_name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming first-order optimization experiment runner"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  long seed_override = -1;

  auto* run = app.add_subcommand("run", "Execute one experiment config");
  run->add_option("--config", config_path, "Config file path");
  run->add_option("--preset", preset, "Built-in experiment")
      ->check(CLI::IsMember(cli::preset_names()));
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed-override", seed_override,
                  "Replace the problem/experiment and noise seeds");

  std::vector<std::string> grid_args;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep->add_option("--config", config_path, "Config file path");
  sweep->add_option("--preset", preset, "Built-in experiment")
      ->check(CLI::IsMember(cli::preset_names()));
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--seed-override", seed_override,
                    "Replace the problem/experiment and noise seeds");
  sweep->add_option("--set", grid_args,
                    "Grid entry section.key=v1,v2,... (repeatable)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Emit plot-data files for a run");
  report->add_option("dir", report_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cli::ConfigFile cfg = load_config(config_path, preset, seed_override);
      fs::path out = pick_out_dir(cfg, out_dir, preset.empty() ? "run" : preset);
      cli::RunResult result = cli::run_experiment(cfg, out);
      std::cout << "run complete: " << result.directory.string() << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      cli::ConfigFile cfg = load_config(config_path, preset, seed_override);
      std::vector<std::pair<std::string, std::vector<std::string>>> grid;
      for (const auto& arg : grid_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos)
          throw ConfigError("--set expects section.key=v1,v2,...: " + arg);
        grid.emplace_back(arg.substr(0, eq),
                          cli::split_list(arg.substr(eq + 1)));
      }
      fs::path out =
          pick_out_dir(cfg, out_dir, preset.empty() ? "sweep" : preset + "_sweep");
      cli::SweepResult result = cli::run_sweep(cfg, grid, out);
      std::cout << "sweep complete: " << result.total - result.failed << "/"
                << result.total << " runs ok, summary at "
                << (result.directory / "summary.csv").string() << "\n";
      return result.failed == 0 ? 0 : 3;
    }
    if (report->parsed()) {
      auto files = cli::write_report(fs::path(report_dir));
      for (const auto& f : files) std::cout << f.string() << "\n";
      return 0;
    }
  } catch (const ConfigError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
