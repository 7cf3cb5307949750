#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coverset/errors.hpp"
#include "coverset/harness.hpp"
#include "oracle.hpp"

using namespace coverset;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("coverset_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json small_config(const std::string& algorithm) {
  return {{"area", {{"width", 50}, {"height", 50}, {"cells_x", 50}, {"cells_y", 50}}},
          {"radius", 8},
          {"n_sensors", 30},
          {"algorithm", algorithm},
          {"generations", 40},
          {"seed", 3},
          {"population", 20},
          {"checkpoints", {10, 20, 30, 40}}};
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto cfg = parse_run_config(nlohmann::json::object());
    CHECK(cfg.algorithm == Algorithm::Lo);
    CHECK(cfg.generations == 250);
    CHECK(cfg.radius == 10.0);
    CHECK(cfg.ga.k1 == 1.0);
    CHECK(cfg.aco.beta == 6.0);
  }
  SUBCASE("invalid algorithm lists the valid names") {
    try {
      parse_run_config({{"algorithm", "sa"}});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("iga, baca, iga-baca, lo, pso, random") != std::string::npos);
    }
  }
  SUBCASE("unknown keys") {
    CHECK_THROWS_AS(parse_run_config({{"generation", 5}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"params", {{"gamma", 1}}}}), ConfigError);
  }
  SUBCASE("range checks") {
    CHECK_THROWS_AS(parse_run_config({{"generations", 0}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"generations", 10}, {"checkpoints", {11}}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"params", {{"alpha", 0.5}}}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"params", {{"k1", 0.2}}}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"radius", -1}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"seed", "one"}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"algorithm", "iga-baca"}, {"params", {{"iga_generations", 0}}}}),
                    ConfigError);
  }
  SUBCASE("schedule and ants") {
    const auto cfg = parse_run_config(
        {{"algorithm", "iga-baca"}, {"generations", 300}, {"params", {{"iga_generations", 150}}}});
    REQUIRE(cfg.schedule.has_value());
    CHECK(cfg.schedule->iga_generations == 150);
    CHECK(cfg.schedule->baca_generations == 150);
    CHECK(parse_run_config({{"algorithm", "baca"}, {"params", {{"n_ants", 12}}}}).population == 12);
    CHECK_THROWS_AS(parse_run_config({{"algorithm", "iga-baca"}, {"params", {{"n_ants", 12}}}}), ConfigError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_run_config("/nonexistent/coverset.json"), IoError); }
}

TEST_CASE("run_experiment") {
  SUBCASE("snapshots at every checkpoint, consistent with the trace") {
    auto cfg = parse_run_config(small_config("lo"));
    const auto r = run_experiment(cfg);
    REQUIRE(r.snapshots.size() == 4);
    for (const auto& s : r.snapshots) {
      const auto& rec = r.trace.at_generation(s.generation);
      CHECK(s.coverage_pct == doctest::Approx(100.0 * rec.best_f1));
      CHECK(s.active_count == rec.best_active);
      CHECK(s.best_combined == rec.best_combined);
    }
    CHECK(r.best_report.objective == r.trace.back().best_combined);
  }
  SUBCASE("random baseline") {
    auto cfg = parse_run_config(small_config("random"));
    const auto r = run_experiment(cfg);
    REQUIRE(r.snapshots.size() == 1);
    CHECK(r.snapshots[0].active_count == 30);
    CHECK(r.best_bits.count() == 30);
  }
  SUBCASE("every algorithm runs") {
    for (const char* name : {"iga", "baca", "iga-baca", "lo", "pso"}) {
      CAPTURE(name);
      auto cfg = parse_run_config(small_config(name));
      const auto r = run_experiment(cfg);
      CHECK(r.trace.size() == 40);
    }
  }
  SUBCASE("artifacts are byte-identical across runs") {
    auto doc = small_config("iga-baca");
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    doc["output_dir"] = a.string();
    run_experiment(parse_run_config(doc));
    doc["output_dir"] = b.string();
    run_experiment(parse_run_config(doc));
    // result.json echoes output_dir, the one input that differs here
    for (const char* f : {"convergence.csv", "snapshots.csv", "deployment.json", "best.pgm", "best.txt",
                          "best.json"}) {
      CAPTURE(f);
      CHECK(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    auto ra = nlohmann::json::parse(slurp(a / "result.json"));
    auto rb = nlohmann::json::parse(slurp(b / "result.json"));
    ra["config"].erase("output_dir");
    rb["config"].erase("output_dir");
    CHECK(ra == rb);
    CHECK(slurp(a / "convergence.csv").rfind("generation,best_combined,best_f1,best_active,wallclock_ms\n", 0) == 0);
  }
  SUBCASE("deployment file input") {
    const auto dir = scratch("depfile");
    fs::create_directories(dir);
    std::ofstream(dir / "d.json") << R"({"radius": 10, "sensors": [[50, 50]]})";
    auto doc = small_config("random");
    doc["area"] = {{"width", 100}, {"height", 100}, {"cells_x", 100}, {"cells_y", 100}};
    doc["deployment_file"] = "d.json";
    std::ofstream(dir / "cfg.json") << doc.dump();
    const auto r = run_experiment(load_run_config(dir / "cfg.json"));
    CHECK(r.best_report.covered_area == double(oracle::kSingleSensorDiskCells));
  }
  SUBCASE("unwritable output directory") {
    const auto dir = scratch("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    auto doc = small_config("random");
    doc["output_dir"] = (dir / "file" / "sub").string();
    try {
      run_experiment(parse_run_config(doc));
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.path() == dir / "file" / "sub");
    }
  }
}

TEST_CASE("compare") {
  SUBCASE("one config and one seed reproduces the run's snapshots") {
    auto cfg = parse_run_config(small_config("iga"));
    const auto single = run_experiment(cfg);
    const auto cmp = compare({cfg}, {cfg.seed});
    REQUIRE(cmp.rows.size() == single.snapshots.size());
    for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
      CHECK(cmp.rows[i].runs == 1);
      CHECK(cmp.rows[i].checkpoint == single.snapshots[i].generation);
      CHECK(cmp.rows[i].coverage_median == single.snapshots[i].coverage_pct);
      CHECK(cmp.rows[i].active_median == double(single.snapshots[i].active_count));
    }
  }
  SUBCASE("ten seeds aggregate into medians") {
    auto cfg = parse_run_config(small_config("lo"));
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto out = scratch("compare");
    const auto cmp = compare({cfg}, seeds, out, 4);
    for (const auto& row : cmp.rows) {
      CHECK(row.runs == 10);
      CHECK(row.coverage_min <= row.coverage_median);
      CHECK(row.coverage_median <= row.coverage_max);
    }
    CHECK(fs::exists(out / "comparison.csv"));
    CHECK(fs::exists(out / "runs" / "lo-seed7" / "convergence.csv"));
    CHECK(slurp(out / "comparison.csv")
              .rfind("algorithm,checkpoint,runs,coverage_pct_median,coverage_pct_min,coverage_pct_max,", 0) == 0);
  }
  SUBCASE("empty inputs") {
    CHECK_THROWS_AS(compare({}, {1}), ConfigError);
    CHECK_THROWS_AS(compare({parse_run_config(small_config("lo"))}, {}), ConfigError);
  }
}

TEST_CASE("emit_coverage_map") {
  const auto dir = scratch("maps");
  const auto g = MonitoringGrid::standard();
  auto pixels = [](const fs::path& p) {
    std::ifstream in(p);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    std::vector<int> v(static_cast<std::size_t>(w * h));
    for (int& x : v) in >> x;
    return v;
  };
  SUBCASE("all off is dark") {
    emit_coverage_map(Deployment({{50, 50}}, 10), ControlVector(1), g, dir / "dark.pgm");
    for (int p : pixels(dir / "dark.pgm")) CHECK(p == 0);
  }
  SUBCASE("full coverage is bright") {
    std::vector<Sensor> s;
    for (int y = 0; y <= 100; y += 10) {
      for (int x = 0; x <= 100; x += 10) s.push_back({double(x), double(y)});
    }
    emit_coverage_map(Deployment(s, 10), ControlVector(s.size(), true), g, dir / "bright.pgm");
    for (int p : pixels(dir / "bright.pgm")) CHECK(p == 255);
  }
  SUBCASE("single sensor disk") {
    emit_coverage_map(Deployment({{50, 50}}, 10), ControlVector(1, true), g, dir / "disk.pgm");
    const auto px = pixels(dir / "disk.pgm");
    CHECK(std::count(px.begin(), px.end(), 255) == long(oracle::kSingleSensorDiskCells));
    const auto side = nlohmann::json::parse(slurp(dir / "disk.json"));
    CHECK(side.at("active_count") == 1);
    CHECK(side.at("f1").get<double>() == doctest::Approx(0.0316));
    const auto txt = slurp(dir / "disk.txt");
    CHECK(std::count(txt.begin(), txt.end(), '#') == long(oracle::kSingleSensorDiskCells));
  }
}
