#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coverset/ant_colony.hpp"
#include "coverset/coverage.hpp"
#include "coverset/framework.hpp"
#include "coverset/genetic.hpp"
#include "coverset/lion.hpp"
#include "coverset/pso.hpp"

namespace coverset {

enum class Algorithm { Iga, Baca, IgaBaca, Lo, Pso, Random };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

/// One experiment, read from a single JSON document. `source` keeps the document
/// exactly as read so results can echo it back.
struct RunConfig {
  double width = 100.0;
  double height = 100.0;
  int cells_x = 100;
  int cells_y = 100;
  double radius = 10.0;
  std::size_t n_sensors = 100;
  Algorithm algorithm = Algorithm::Lo;
  std::size_t generations = 250;
  std::uint64_t seed = 1;
  std::size_t population = 40;
  ObjectiveMode objective = ObjectiveMode::CoverageSquaredOverUse;
  std::optional<double> target_fitness;
  std::vector<std::size_t> checkpoints;       // empty -> final generation only
  std::filesystem::path output_dir;           // empty -> no artifacts written
  std::optional<std::filesystem::path> deployment_file;
  bool record_wallclock = false;
  std::string label;                          // defaults to the algorithm name

  AdaptiveGaParams ga;
  AcoParams aco;
  std::optional<IgaBacaSchedule> schedule;    // unset -> half of the budget per phase
  LionParams lion;
  PsoParams pso;

  nlohmann::json source;
};

/// Throws ConfigError on unknown keys, bad types or out-of-range values.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct Snapshot {
  std::size_t generation = 0;
  double coverage_pct = 0.0;
  std::size_t active_count = 0;
  double best_combined = 0.0;
  double elapsed_ms = 0.0;
};

struct RunResult {
  Deployment deployment;
  ControlVector best_bits;
  FitnessReport best_report;
  ConvergenceTrace trace;
  std::vector<Snapshot> snapshots;
  std::size_t uncovered_cells = 0;
  std::size_t hole_components = 0;
  nlohmann::json metadata;
};

/// Builds the deployment (from file, or seeded random), runs the configured
/// algorithm and writes artifacts into cfg.output_dir when set:
///   convergence.csv, snapshots.csv, timing.csv, deployment.json, result.json,
///   best.pgm / best.txt / best.json
RunResult run_experiment(const RunConfig& cfg);

struct ComparisonRow {
  std::string label;
  std::size_t checkpoint = 0;
  std::size_t runs = 0;
  double coverage_median = 0.0;
  double coverage_min = 0.0;
  double coverage_max = 0.0;
  double active_median = 0.0;
  std::size_t active_min = 0;
  std::size_t active_max = 0;
  double elapsed_ms_median = 0.0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  /// results[c][s]: config c run with seeds[s].
  std::vector<std::vector<RunResult>> results;
};

/// Runs every config under every seed (independent runs in parallel) and
/// aggregates medians and ranges per (label, checkpoint). Per-run artifacts go to
/// out_dir/runs/<label>-seed<seed> when out_dir is set.
Comparison compare(const std::vector<RunConfig>& configs, const std::vector<std::uint64_t>& seeds,
                   const std::filesystem::path& out_dir = {}, unsigned parallel_runs = 0);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Manifest: {"configs": ["a.json", ...]}, paths relative to the manifest.
std::vector<RunConfig> load_manifest(const std::filesystem::path& path);

/// Writes `path` as PGM plus sibling .txt (ASCII) and .json (f1, active_count, ...).
void emit_coverage_map(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g,
                       const std::filesystem::path& path);

}  // namespace coverset
