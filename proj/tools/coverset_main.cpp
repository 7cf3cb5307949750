// coverset: command-line front end for the sensor-coverage optimizers.
//
//   coverset run --config <path> [--seed <u64>] [--out <dir>]
//   coverset compare --manifest <path> --seeds <a,b,c> --out <dir>
//   coverset map --deployment <json> --bits <string> --out <path>
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 internal invariant violation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "coverset/errors.hpp"
#include "coverset/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;
constexpr int kInvariantError = 4;

void print_snapshots(const coverset::RunResult& r) {
  std::printf("%10s  %12s  %12s  %14s\n", "generation", "coverage %", "active", "best combined");
  for (const auto& s : r.snapshots) {
    std::printf("%10zu  %12.2f  %12zu  %14.6f\n", s.generation, s.coverage_pct, s.active_count, s.best_combined);
  }
  std::printf("uncovered cells: %zu in %zu hole(s)\n", r.uncovered_cells, r.hole_components);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor-coverage optimization with nature-inspired metaheuristics"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a JSON config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string run_out;
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the configured seed");
  run_cmd->add_option("--out", run_out, "Output directory (overrides output_dir)");

  auto* compare_cmd = app.add_subcommand("compare", "Run several configs over several seeds and aggregate");
  std::string manifest_path;
  std::vector<std::uint64_t> seeds;
  std::string compare_out;
  compare_cmd->add_option("--manifest", manifest_path, "Manifest listing config files")->required();
  compare_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->required()->delimiter(',');
  compare_cmd->add_option("--out", compare_out, "Output directory")->required();

  auto* map_cmd = app.add_subcommand("map", "Render the coverage map of a control vector");
  std::string deployment_path;
  std::string bits;
  std::string map_out;
  double width = 100.0;
  double height = 100.0;
  int cells_x = 100;
  int cells_y = 100;
  map_cmd->add_option("--deployment", deployment_path, "Deployment JSON")->required();
  map_cmd->add_option("--bits", bits, "Control vector as a 0/1 string")->required();
  map_cmd->add_option("--out", map_out, "Output PGM path (.txt and .json written alongside)")->required();
  map_cmd->add_option("--width", width, "Area width in meters");
  map_cmd->add_option("--height", height, "Area height in meters");
  map_cmd->add_option("--cells-x", cells_x, "Grid cells along x");
  map_cmd->add_option("--cells-y", cells_y, "Grid cells along y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) {
      auto cfg = coverset::load_run_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!run_out.empty()) cfg.output_dir = run_out;
      const auto result = coverset::run_experiment(cfg);
      std::printf("%s seed %llu: best combined %.6f, coverage %.2f %%, %zu active\n", cfg.label.c_str(),
                  static_cast<unsigned long long>(cfg.seed), result.best_report.combined,
                  100.0 * result.best_report.f1, result.best_report.active_count);
      print_snapshots(result);
    } else if (*compare_cmd) {
      const auto configs = coverset::load_manifest(manifest_path);
      const auto cmp = coverset::compare(configs, seeds, compare_out);
      coverset::write_comparison_csv(std::cout, cmp.rows);
    } else if (*map_cmd) {
      std::ifstream in(deployment_path);
      if (!in) throw coverset::IoError(deployment_path, "cannot open file");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw coverset::ConfigError(std::string("invalid deployment JSON: ") + e.what());
      }
      const auto deployment = coverset::deployment_from_json(doc);
      const auto cv = coverset::ControlVector::from_string(bits);
      coverset::emit_coverage_map(deployment, cv, coverset::MonitoringGrid(width, height, cells_x, cells_y), map_out);
    }
  } catch (const coverset::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const coverset::InvariantViolation& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return kInvariantError;
  } catch (const coverset::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariantError;
  }
  return 0;
}
