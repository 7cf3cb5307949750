#include "coverset/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "coverset/errors.hpp"

namespace coverset {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "area",       "radius",         "n_sensors",  "algorithm",       "generations",      "seed",
    "population", "objective",      "params",     "target_fitness",  "checkpoints",      "output_dir",
    "deployment_file", "record_wallclock", "label"};

const std::set<std::string> kParamKeys = {
    // adaptive GA
    "k1", "k2", "k3", "k4", "pc_min", "pc_max", "pm_min", "pm_max",
    // ant colony
    "alpha", "beta", "rho", "n_ants", "initial_c", "tau_min", "tau_max", "deposit",
    // combined schedule
    "iga_generations", "baca_generations", "outer_loops",
    // lion
    "nomad_fraction", "prides", "female_fraction", "mating_prob", "mutation_rate", "binarize_threshold",
    // particle swarm
    "w", "c1", "c2", "v_max", "binarize"};

template <typename T>
T get_as(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + key + "' has the wrong type");
  }
}

template <typename T>
void read_if(const json& doc, const std::string& key, T& into) {
  if (doc.contains(key)) into = get_as<T>(doc, key);
}

std::size_t read_count(const json& doc, const std::string& key, std::size_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot write file");
  out.imbue(std::locale::classic());
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError(dir, "cannot create output directory");
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::unique_ptr<Optimizer> make_optimizer(const RunConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Iga:
      return std::make_unique<AdaptiveGa>(cfg.ga);
    case Algorithm::Baca:
      return std::make_unique<BinaryAntColony>(cfg.aco);
    case Algorithm::IgaBaca: {
      IgaBacaSchedule schedule;
      if (cfg.schedule) {
        schedule = *cfg.schedule;
      } else {
        schedule.iga_generations = (cfg.generations + 1) / 2;
        schedule.baca_generations = std::max<std::size_t>(1, cfg.generations - schedule.iga_generations);
        schedule.outer_loops = 1;
      }
      return std::make_unique<IgaBaca>(schedule, cfg.ga, cfg.aco);
    }
    case Algorithm::Lo: {
      LionParams lp = cfg.lion;
      lp.population = cfg.population;
      return std::make_unique<LionOptimizer>(lp);
    }
    case Algorithm::Pso: {
      PsoParams pp = cfg.pso;
      pp.swarm = cfg.population;
      return std::make_unique<BinaryPso>(pp);
    }
    case Algorithm::Random:
      break;
  }
  return nullptr;
}

json report_to_json(const FitnessReport& r) {
  return {{"covered_area", r.covered_area}, {"f1", r.f1},         {"f2", r.f2},
          {"combined", r.combined},         {"objective", r.objective}, {"active_count", r.active_count}};
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "iga") return Algorithm::Iga;
  if (name == "baca") return Algorithm::Baca;
  if (name == "iga-baca") return Algorithm::IgaBaca;
  if (name == "lo") return Algorithm::Lo;
  if (name == "pso") return Algorithm::Pso;
  if (name == "random") return Algorithm::Random;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (valid: iga, baca, iga-baca, lo, pso, random)");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Iga: return "iga";
    case Algorithm::Baca: return "baca";
    case Algorithm::IgaBaca: return "iga-baca";
    case Algorithm::Lo: return "lo";
    case Algorithm::Pso: return "pso";
    case Algorithm::Random: return "random";
  }
  return "unknown";
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevelKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  RunConfig cfg;
  cfg.source = doc;

  if (doc.contains("area")) {
    const json& area = doc.at("area");
    if (!area.is_object()) throw ConfigError("config: 'area' must be an object");
    for (const auto& [key, value] : area.items()) {
      if (key != "width" && key != "height" && key != "cells_x" && key != "cells_y") {
        throw ConfigError("config: unknown area key '" + key + "'");
      }
    }
    read_if(area, "width", cfg.width);
    read_if(area, "height", cfg.height);
    read_if(area, "cells_x", cfg.cells_x);
    read_if(area, "cells_y", cfg.cells_y);
  }
  read_if(doc, "radius", cfg.radius);
  cfg.n_sensors = read_count(doc, "n_sensors", cfg.n_sensors);
  if (doc.contains("algorithm")) cfg.algorithm = parse_algorithm(get_as<std::string>(doc, "algorithm"));
  cfg.generations = read_count(doc, "generations", cfg.generations);
  if (doc.contains("seed")) cfg.seed = get_as<std::uint64_t>(doc, "seed");
  cfg.population = read_count(doc, "population", cfg.population);
  if (doc.contains("objective")) {
    try {
      cfg.objective = parse_objective_mode(get_as<std::string>(doc, "objective"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (doc.contains("target_fitness") && !doc.at("target_fitness").is_null()) {
    cfg.target_fitness = get_as<double>(doc, "target_fitness");
  }
  if (doc.contains("checkpoints")) cfg.checkpoints = get_as<std::vector<std::size_t>>(doc, "checkpoints");
  if (doc.contains("output_dir")) cfg.output_dir = get_as<std::string>(doc, "output_dir");
  if (doc.contains("deployment_file")) {
    std::filesystem::path p = get_as<std::string>(doc, "deployment_file");
    cfg.deployment_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  read_if(doc, "record_wallclock", cfg.record_wallclock);
  cfg.label = doc.contains("label") ? get_as<std::string>(doc, "label") : std::string(to_string(cfg.algorithm));

  if (doc.contains("params")) {
    const json& params = doc.at("params");
    if (!params.is_object()) throw ConfigError("config: 'params' must be an object");
    for (const auto& [key, value] : params.items()) {
      if (!kParamKeys.contains(key)) throw ConfigError("config: unknown parameter '" + key + "'");
    }
    read_if(params, "k1", cfg.ga.k1);
    read_if(params, "k2", cfg.ga.k2);
    read_if(params, "k3", cfg.ga.k3);
    read_if(params, "k4", cfg.ga.k4);
    read_if(params, "pc_min", cfg.ga.pc_min);
    read_if(params, "pc_max", cfg.ga.pc_max);
    read_if(params, "pm_min", cfg.ga.pm_min);
    read_if(params, "pm_max", cfg.ga.pm_max);

    read_if(params, "alpha", cfg.aco.alpha);
    read_if(params, "beta", cfg.aco.beta);
    read_if(params, "rho", cfg.aco.rho);
    read_if(params, "initial_c", cfg.aco.initial_c);
    read_if(params, "tau_min", cfg.aco.tau_min);
    read_if(params, "tau_max", cfg.aco.tau_max);
    if (params.contains("n_ants")) {
      cfg.aco.n_ants = read_count(params, "n_ants", cfg.aco.n_ants);
      if (cfg.algorithm == Algorithm::Baca) {
        cfg.population = cfg.aco.n_ants;
      } else if (cfg.algorithm == Algorithm::IgaBaca && cfg.aco.n_ants != cfg.population) {
        throw ConfigError("config: iga-baca uses one population for both phases; n_ants must equal population");
      }
    }
    if (params.contains("deposit")) {
      const auto rule = get_as<std::string>(params, "deposit");
      if (rule == "fitness") {
        cfg.aco.deposit = DepositRule::Fitness;
      } else if (rule == "inverse-fitness") {
        cfg.aco.deposit = DepositRule::InverseFitness;
      } else {
        throw ConfigError("config: deposit must be 'fitness' or 'inverse-fitness'");
      }
    }
    if (params.contains("iga_generations") || params.contains("baca_generations") ||
        params.contains("outer_loops")) {
      IgaBacaSchedule s;
      s.iga_generations = read_count(params, "iga_generations", (cfg.generations + 1) / 2);
      s.baca_generations = read_count(params, "baca_generations", cfg.generations - (cfg.generations + 1) / 2);
      s.outer_loops = read_count(params, "outer_loops", 1);
      cfg.schedule = s;
    }

    read_if(params, "nomad_fraction", cfg.lion.nomad_fraction);
    cfg.lion.prides = read_count(params, "prides", cfg.lion.prides);
    read_if(params, "female_fraction", cfg.lion.female_fraction);
    read_if(params, "mating_prob", cfg.lion.mating_prob);
    read_if(params, "mutation_rate", cfg.lion.mutation_rate);
    read_if(params, "binarize_threshold", cfg.lion.binarize_threshold);

    read_if(params, "w", cfg.pso.w);
    read_if(params, "c1", cfg.pso.c1);
    read_if(params, "c2", cfg.pso.c2);
    read_if(params, "v_max", cfg.pso.v_max);
    if (params.contains("binarize")) {
      const auto mode = get_as<std::string>(params, "binarize");
      if (mode == "threshold") {
        cfg.pso.binarize = ParticleBinarization::Threshold;
      } else if (mode == "bernoulli") {
        cfg.pso.binarize = ParticleBinarization::Bernoulli;
      } else {
        throw ConfigError("config: binarize must be 'threshold' or 'bernoulli'");
      }
    }
  }

  if (cfg.generations < 1) throw ConfigError("config: generations must be at least 1");
  if (cfg.n_sensors < 1) throw ConfigError("config: n_sensors must be at least 1");
  if (cfg.population < 1) throw ConfigError("config: population must be at least 1");
  for (std::size_t c : cfg.checkpoints) {
    if (c < 1 || c > cfg.generations) {
      throw ConfigError("config: checkpoint " + std::to_string(c) + " outside [1, generations]");
    }
  }
  std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
  cfg.checkpoints.erase(std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()), cfg.checkpoints.end());

  // Parameter ranges are owned by the modules; surface their messages as config errors.
  try {
    MonitoringGrid(cfg.width, cfg.height, cfg.cells_x, cfg.cells_y);
    if (!(cfg.radius > 0.0)) throw InvalidArgument("radius must be positive");
    cfg.ga.validate();
    cfg.aco.validate();
    if (cfg.schedule) cfg.schedule->validate();
    if (cfg.algorithm == Algorithm::Lo) {
      LionParams lp = cfg.lion;
      lp.population = cfg.population;
      lp.validate();
    } else {
      cfg.lion.validate();
    }
    cfg.pso.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

RunResult run_experiment(const RunConfig& cfg) {
  const MonitoringGrid grid(cfg.width, cfg.height, cfg.cells_x, cfg.cells_y);
  const RngStream root(cfg.seed);

  std::optional<Deployment> deployment;
  if (cfg.deployment_file) {
    try {
      deployment = deployment_from_json(read_json_file(*cfg.deployment_file));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("deployment file: ") + e.what());
    }
  } else {
    deployment = random_deployment(cfg.n_sensors, cfg.radius, grid, root.derive("deployment").next_u64());
  }
  deployment->check_within(grid);

  CoverageProblem problem(*deployment, grid, cfg.objective, threads_from_environment());
  RunResult result{*deployment, ControlVector(deployment->size()), {}, {}, {}, 0, 0, {}};

  const std::vector<std::size_t> checkpoints =
      cfg.checkpoints.empty() ? std::vector<std::size_t>{cfg.generations} : cfg.checkpoints;

  if (cfg.algorithm == Algorithm::Random) {
    result.best_bits = ControlVector(deployment->size(), true);
    result.best_report = problem.evaluate(result.best_bits);
    result.trace.append({1, result.best_report.objective, result.best_report.f1, result.best_report.active_count, 0.0});
    result.snapshots.push_back({1, 100.0 * result.best_report.f1, result.best_report.active_count,
                                result.best_report.objective, 0.0});
  } else {
    auto optimizer = make_optimizer(cfg);
    RngStream rng = root.derive("optimizer");
    Population initial = optimizer->initialize(cfg.population, problem, rng);
    RunOutcome outcome =
        run(*optimizer, std::move(initial), Termination{cfg.generations, cfg.target_fitness}, rng, problem);
    result.best_bits = outcome.best.bits;
    result.best_report = *outcome.best.fitness;
    result.trace = std::move(outcome.trace);
    for (std::size_t c : checkpoints) {
      const TraceRecord& r = result.trace.at_generation(c);
      result.snapshots.push_back({c, 100.0 * r.best_f1, r.best_active, r.best_combined, r.wallclock_ms});
    }
  }

  const HoleReport holes = problem.model().find_holes(result.best_bits);
  result.uncovered_cells = holes.uncovered_cells.size();
  result.hole_components = holes.components.size();

  json resolved = {
      {"area", {{"width", cfg.width}, {"height", cfg.height}, {"cells_x", cfg.cells_x}, {"cells_y", cfg.cells_y}}},
      {"radius", cfg.radius},
      {"n_sensors", deployment->size()},
      {"algorithm", to_string(cfg.algorithm)},
      {"generations", cfg.generations},
      {"seed", cfg.seed},
      {"population", cfg.population},
      {"objective", to_string(cfg.objective)},
      {"params",
       {{"k1", cfg.ga.k1}, {"k2", cfg.ga.k2}, {"k3", cfg.ga.k3}, {"k4", cfg.ga.k4},
        {"alpha", cfg.aco.alpha}, {"beta", cfg.aco.beta}, {"rho", cfg.aco.rho},
        {"tau_min", cfg.aco.tau_min}, {"tau_max", cfg.aco.tau_max}, {"initial_c", cfg.aco.initial_c}}},
  };
  result.metadata = {{"config", cfg.source},
                     {"resolved", resolved},
                     {"label", cfg.label},
                     {"best_bits", result.best_bits.to_string()},
                     {"best", report_to_json(result.best_report)},
                     {"uncovered_cells", result.uncovered_cells},
                     {"hole_components", result.hole_components}};

  if (!cfg.output_dir.empty()) {
    ensure_directory(cfg.output_dir);
    {
      auto out = open_output(cfg.output_dir / "convergence.csv");
      result.trace.write_csv(out, cfg.record_wallclock);
    }
    {
      auto out = open_output(cfg.output_dir / "snapshots.csv");
      out << "generation,coverage_pct,active_count,best_combined\n" << std::setprecision(17);
      for (const auto& s : result.snapshots) {
        out << s.generation << ',' << s.coverage_pct << ',' << s.active_count << ',' << s.best_combined << '\n';
      }
    }
    {
      auto out = open_output(cfg.output_dir / "timing.csv");
      out << "generation,elapsed_ms\n";
      for (const auto& s : result.snapshots) out << s.generation << ',' << s.elapsed_ms << '\n';
    }
    open_output(cfg.output_dir / "deployment.json") << deployment_to_json(*deployment).dump(2) << '\n';
    open_output(cfg.output_dir / "result.json") << result.metadata.dump(2) << '\n';
    emit_coverage_map(*deployment, result.best_bits, grid, cfg.output_dir / "best.pgm");
  }
  return result;
}

Comparison compare(const std::vector<RunConfig>& configs, const std::vector<std::uint64_t>& seeds,
                   const std::filesystem::path& out_dir, unsigned parallel_runs) {
  if (configs.empty()) throw ConfigError("compare: at least one config is required");
  if (seeds.empty()) throw ConfigError("compare: at least one seed is required");

  struct Job {
    std::size_t config;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({c, s});
  }

  Comparison cmp;
  cmp.results.assign(configs.size(), std::vector<RunResult>(seeds.size(), RunResult{
      Deployment({Sensor{}}, 1.0), ControlVector(), {}, {}, {}, 0, 0, {}}));

  const unsigned workers = std::max(1U, std::min<unsigned>(
      parallel_runs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : parallel_runs,
      static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
          try {
            RunConfig cfg = configs[jobs[k].config];
            cfg.seed = seeds[jobs[k].seed];
            cfg.output_dir = out_dir.empty() ? std::filesystem::path{}
                                             : out_dir / "runs" / (cfg.label + "-seed" + std::to_string(cfg.seed));
            cmp.results[jobs[k].config][jobs[k].seed] = run_experiment(cfg);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::map<std::size_t, std::vector<const Snapshot*>> by_checkpoint;
    for (const RunResult& r : cmp.results[c]) {
      for (const Snapshot& s : r.snapshots) by_checkpoint[s.generation].push_back(&s);
    }
    for (const auto& [checkpoint, snaps] : by_checkpoint) {
      ComparisonRow row;
      row.label = configs[c].label;
      row.checkpoint = checkpoint;
      row.runs = snaps.size();
      std::vector<double> cov, active, elapsed;
      for (const Snapshot* s : snaps) {
        cov.push_back(s->coverage_pct);
        active.push_back(static_cast<double>(s->active_count));
        elapsed.push_back(s->elapsed_ms);
      }
      row.coverage_median = median(cov);
      row.coverage_min = *std::min_element(cov.begin(), cov.end());
      row.coverage_max = *std::max_element(cov.begin(), cov.end());
      row.active_median = median(active);
      row.active_min = static_cast<std::size_t>(*std::min_element(active.begin(), active.end()));
      row.active_max = static_cast<std::size_t>(*std::max_element(active.begin(), active.end()));
      row.elapsed_ms_median = median(elapsed);
      cmp.rows.push_back(row);
    }
  }

  if (!out_dir.empty()) {
    ensure_directory(out_dir);
    auto out = open_output(out_dir / "comparison.csv");
    write_comparison_csv(out, cmp.rows);
  }
  return cmp;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << "algorithm,checkpoint,runs,coverage_pct_median,coverage_pct_min,coverage_pct_max,"
         "active_median,active_min,active_max,time_ms_median\n";
  buf << std::setprecision(10);
  for (const auto& r : rows) {
    buf << r.label << ',' << r.checkpoint << ',' << r.runs << ',' << r.coverage_median << ',' << r.coverage_min
        << ',' << r.coverage_max << ',' << r.active_median << ',' << r.active_min << ',' << r.active_max << ','
        << r.elapsed_ms_median << '\n';
  }
  out << buf.str();
}

std::vector<RunConfig> load_manifest(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("configs") || !doc.at("configs").is_array()) {
    throw ConfigError("manifest: expected {\"configs\": [paths...]}");
  }
  std::vector<RunConfig> configs;
  for (const auto& entry : doc.at("configs")) {
    if (!entry.is_string()) throw ConfigError("manifest: config entries must be paths");
    std::filesystem::path p = entry.get<std::string>();
    configs.push_back(load_run_config(p.is_relative() ? path.parent_path() / p : p));
  }
  if (configs.empty()) throw ConfigError("manifest: no configs listed");
  return configs;
}

void emit_coverage_map(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g,
                       const std::filesystem::path& path) {
  const CoverageModel model(d, g);
  const auto mask = model.covered_mask(cv);
  const FitnessReport report = model.evaluate(cv);
  const HoleReport holes = model.find_holes(cv);
  if (path.has_parent_path()) ensure_directory(path.parent_path());

  auto pgm = open_output(path);
  write_pgm(pgm, mask, g);
  auto txt = open_output(std::filesystem::path(path).replace_extension(".txt"));
  write_ascii(txt, mask, g);
  json sidecar = {{"f1", report.f1},
                  {"active_count", report.active_count},
                  {"covered_area", report.covered_area},
                  {"combined", report.combined},
                  {"uncovered_cells", holes.uncovered_cells.size()},
                  {"hole_components", holes.components.size()}};
  open_output(std::filesystem::path(path).replace_extension(".json")) << sidecar.dump(2) << '\n';
}

}  // namespace coverset
