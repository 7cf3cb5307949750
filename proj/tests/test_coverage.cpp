#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "coverset/coverage.hpp"
#include "coverset/errors.hpp"
#include "oracle.hpp"

using namespace coverset;

namespace {

Deployment single_sensor() { return Deployment({{50.0, 50.0}}, 10.0); }

/// Sensors on a 10 m lattice with radius 10 cover every 1 m cell center.
Deployment dense_lattice() {
  std::vector<Sensor> s;
  for (int y = 0; y <= 100; y += 10) {
    for (int x = 0; x <= 100; x += 10) s.push_back({double(x), double(y)});
  }
  return Deployment(std::move(s), 10.0);
}

}  // namespace

TEST_CASE("is_covered uses a closed Euclidean disk") {
  const Sensor s{50.0, 50.0};
  CHECK(is_covered(50, 55, s, 10));
  CHECK_FALSE(is_covered(50, 61, s, 10));
  CHECK(is_covered(50, 60, s, 10));
  // A '-' between the squared terms would accept this point.
  CHECK_FALSE(is_covered(59, 59, s, 10));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(MonitoringGrid(0.0, 10.0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(MonitoringGrid(10.0, 10.0, 0, 1), InvalidArgument);
  const auto g = MonitoringGrid::standard();
  CHECK(g.cell_dx() * g.cells_x() == doctest::Approx(g.width()));
  CHECK(g.cell_count() == 10000);
  CHECK(g.center_x(0) == 0.5);
}

TEST_CASE("deployment validation") {
  CHECK_THROWS_AS(Deployment({}, 10.0), InvalidArgument);
  CHECK_THROWS_AS(Deployment({{1, 1}}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Deployment({{101, 1}}, 1.0).check_within(MonitoringGrid::standard()), InvalidArgument);
}

TEST_CASE("covered_area") {
  const auto g = MonitoringGrid::standard();
  SUBCASE("all bits zero") { CHECK(covered_area(single_sensor(), ControlVector(1), g) == 0.0); }
  SUBCASE("single sensor matches the enumerated disk") {
    CHECK(covered_area(single_sensor(), ControlVector(1, true), g) == double(oracle::kSingleSensorDiskCells));
    CHECK(std::abs(double(oracle::kSingleSensorDiskCells) - M_PI * 100.0) < 5.0);
  }
  SUBCASE("dense tiling is capped at the area") {
    const auto d = dense_lattice();
    CHECK(covered_area(d, ControlVector(d.size(), true), g) == 10000.0);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(covered_area(single_sensor(), ControlVector(2), g), DimensionError);
  }
  SUBCASE("overlapping sensors are not double counted") {
    const Deployment twin({{50, 50}, {50, 50}}, 10.0);
    CHECK(covered_area(twin, ControlVector(2, true), g) == double(oracle::kSingleSensorDiskCells));
  }
}

TEST_CASE("evaluate") {
  const auto g = MonitoringGrid::standard();
  SUBCASE("combined objective arithmetic") {
    const FitnessReport r = make_report(0.991 * 10000.0, 10000.0, 42, 100, ObjectiveMode::CoverageSquaredOverUse);
    CHECK(r.f2 == doctest::Approx(0.42));
    CHECK(r.combined == doctest::Approx(2.338288095238095).epsilon(1e-12));
    CHECK(r.objective == r.combined);
  }
  SUBCASE("empty active set scores zero") {
    const auto d = dense_lattice();
    const auto r = evaluate(d, ControlVector(d.size()), g);
    CHECK(r.f1 == 0.0);
    CHECK(r.f2 == 0.0);
    CHECK(r.combined == 0.0);
    CHECK(r.active_count == 0);
  }
  SUBCASE("all active") {
    const auto d = random_deployment(100, 10.0, g, 3);
    const auto r = evaluate(d, ControlVector(100, true), g);
    CHECK(r.f2 == 1.0);
    CHECK(r.f1 == r.covered_area / 10000.0);
    CHECK(r.combined == doctest::Approx(r.f1 * r.f1));
  }
  SUBCASE("max-of-objectives mode") {
    const auto d = dense_lattice();
    const auto r = evaluate(d, ControlVector(d.size()), g, ObjectiveMode::MaxOfObjectives);
    CHECK(r.objective == 1.0);  // the degenerate case the default mode avoids
    CHECK(r.combined == 0.0);
  }
  SUBCASE("pure") {
    const auto d = random_deployment(30, 10.0, g, 9);
    RngStream rng(4);
    const auto cv = oracle::random_bits(30, 0.5, rng);
    CHECK(evaluate(d, cv, g) == evaluate(d, cv, g));
  }
}

TEST_CASE("find_coverage_holes") {
  const auto g = MonitoringGrid::standard();
  SUBCASE("nothing active: one hole spanning the grid") {
    const auto h = find_coverage_holes(single_sensor(), ControlVector(1), g);
    CHECK(h.uncovered_cells.size() == 10000);
    REQUIRE(h.components.size() == 1);
    CHECK(h.components[0].size() == 10000);
  }
  SUBCASE("full coverage: no holes") {
    const auto d = dense_lattice();
    const auto h = find_coverage_holes(d, ControlVector(d.size(), true), g);
    CHECK(h.uncovered_cells.empty());
    CHECK(h.components.empty());
  }
  SUBCASE("single sensor: complement of the disk") {
    const auto covered = oracle::covered_cells(single_sensor(), ControlVector(1, true), 100, 100, 100, 100);
    const auto h = find_coverage_holes(single_sensor(), ControlVector(1, true), g);
    CHECK(h.uncovered_cells.size() == 10000 - oracle::kSingleSensorDiskCells);
    for (const auto& c : h.uncovered_cells) CHECK_FALSE(covered[std::size_t(c.j) * 100 + c.i]);
    CHECK(h.components.size() == 1);
  }
  SUBCASE("two separated holes") {
    // A vertical band of coverage splits the area into left and right holes.
    std::vector<Sensor> s;
    for (int y = 0; y <= 100; y += 5) s.push_back({50.0, double(y)});
    const Deployment d(std::move(s), 6.0);
    const auto h = find_coverage_holes(d, ControlVector(d.size(), true), g);
    CHECK(h.components.size() == 2);
  }
}

TEST_CASE("random_deployment") {
  const auto g = MonitoringGrid::standard();
  CHECK_THROWS_AS(random_deployment(0, 10.0, g, 1), InvalidArgument);
  const auto one = random_deployment(1, 10.0, g, 5);
  CHECK(one.size() == 1);
  CHECK(g.contains(one.sensors()[0].x, one.sensors()[0].y));
  const auto a = random_deployment(100, 10.0, g, 77);
  const auto b = random_deployment(100, 10.0, g, 77);
  CHECK(a == b);
  CHECK_FALSE(a == random_deployment(100, 10.0, g, 78));
  a.check_within(g);
}

TEST_CASE("deployment json round trip and errors") {
  const auto d = random_deployment(12, 7.5, MonitoringGrid::standard(), 2);
  const auto j = deployment_to_json(d);
  CHECK(j.at("radius").get<double>() == 7.5);
  CHECK(j.at("sensors").size() == 12);
  CHECK(deployment_from_json(j) == d);
  CHECK_THROWS_AS(deployment_from_json(nlohmann::json{{"radius", 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(deployment_from_json(nlohmann::json::parse(R"({"radius":1,"sensors":[[1]]})")), InvalidArgument);
}

TEST_CASE("control vector parsing") {
  const auto cv = ControlVector::from_string("101111011110");
  CHECK(cv.size() == 12);
  CHECK(cv.count() == 9);
  CHECK(cv.to_string() == "101111011110");
  CHECK_THROWS_AS(ControlVector::from_string("10x"), InvalidArgument);
}

TEST_CASE("map renderings") {
  const MonitoringGrid g(4, 3, 4, 3);
  const Deployment d({{0.5, 2.5}}, 0.1);  // covers exactly the top-left cell center
  const CoverageModel m(d, g);
  const auto mask = m.covered_mask(ControlVector(1, true));
  std::ostringstream pgm, txt;
  write_pgm(pgm, mask, g);
  write_ascii(txt, mask, g);
  CHECK(pgm.str() == "P2\n4 3\n255\n255 0 0 0\n0 0 0 0\n0 0 0 0\n");
  CHECK(txt.str() == "#...\n....\n....\n");
}
