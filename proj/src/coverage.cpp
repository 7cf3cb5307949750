#include "coverset/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <ostream>

#include "coverset/errors.hpp"
#include "coverset/rng.hpp"

namespace coverset {

MonitoringGrid::MonitoringGrid(double width, double height, int cells_x, int cells_y)
    : width_(width), height_(height), cells_x_(cells_x), cells_y_(cells_y) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw InvalidArgument("MonitoringGrid: width and height must be positive");
  }
  if (cells_x < 1 || cells_y < 1) {
    throw InvalidArgument("MonitoringGrid: at least one cell per axis is required");
  }
}

Deployment::Deployment(std::vector<Sensor> sensors, double radius)
    : sensors_(std::move(sensors)), radius_(radius) {
  if (sensors_.empty()) throw InvalidArgument("Deployment: at least one sensor is required");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw InvalidArgument("Deployment: radius must be positive");
  }
}

void Deployment::check_within(const MonitoringGrid& grid) const {
  for (std::size_t i = 0; i < sensors_.size(); ++i) {
    if (!grid.contains(sensors_[i].x, sensors_[i].y)) {
      throw InvalidArgument("Deployment: sensor " + std::to_string(i) + " lies outside the monitoring area");
    }
  }
}

ControlVector::ControlVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InvalidArgument("ControlVector: bits must be 0 or 1");
  }
}

ControlVector ControlVector::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw InvalidArgument("ControlVector: expected only '0' and '1', got '" + std::string(1, c) + "'");
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return ControlVector(std::move(bits));
}

std::string ControlVector::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

std::size_t ControlVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ObjectiveMode parse_objective_mode(std::string_view name) {
  if (name == "coverage-squared-over-use") return ObjectiveMode::CoverageSquaredOverUse;
  if (name == "max-of-objectives") return ObjectiveMode::MaxOfObjectives;
  throw InvalidArgument("unknown objective '" + std::string(name) +
                        "' (valid: coverage-squared-over-use, max-of-objectives)");
}

std::string_view to_string(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::CoverageSquaredOverUse:
      return "coverage-squared-over-use";
    case ObjectiveMode::MaxOfObjectives:
      return "max-of-objectives";
  }
  return "unknown";
}

bool is_covered(double px, double py, const Sensor& sensor, double radius) noexcept {
  const double dx = px - sensor.x;
  const double dy = py - sensor.y;
  return dx * dx + dy * dy <= radius * radius;
}

FitnessReport make_report(double covered_area, double total_area, std::size_t active,
                          std::size_t total_sensors, ObjectiveMode mode) {
  FitnessReport r;
  r.covered_area = covered_area;
  r.f1 = std::clamp(covered_area / total_area, 0.0, 1.0);
  r.active_count = active;
  r.f2 = static_cast<double>(active) / static_cast<double>(total_sensors);
  r.combined = active == 0 ? 0.0 : r.f1 * r.f1 / r.f2;
  switch (mode) {
    case ObjectiveMode::CoverageSquaredOverUse:
      r.objective = r.combined;
      break;
    case ObjectiveMode::MaxOfObjectives:
      r.objective = std::max(r.f1, 1.0 - r.f2);
      break;
  }
  return r;
}

CoverageModel::CoverageModel(Deployment deployment, MonitoringGrid grid)
    : deployment_(std::move(deployment)),
      grid_(grid),
      words_((grid_.cell_count() + 63) / 64),
      masks_(deployment_.size(), std::vector<std::uint64_t>(words_, 0)) {
  const double r = deployment_.radius();
  const double dx = grid_.cell_dx();
  const double dy = grid_.cell_dy();
  for (std::size_t s = 0; s < deployment_.size(); ++s) {
    const Sensor& sensor = deployment_.sensors()[s];
    // Candidate cells: centers inside the sensor's bounding box, widened by one cell.
    const int i0 = std::max(0, static_cast<int>(std::floor((sensor.x - r) / dx - 0.5)) - 1);
    const int i1 = std::min(grid_.cells_x() - 1, static_cast<int>(std::ceil((sensor.x + r) / dx - 0.5)) + 1);
    const int j0 = std::max(0, static_cast<int>(std::floor((sensor.y - r) / dy - 0.5)) - 1);
    const int j1 = std::min(grid_.cells_y() - 1, static_cast<int>(std::ceil((sensor.y + r) / dy - 0.5)) + 1);
    auto& mask = masks_[s];
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        if (is_covered(grid_.center_x(i), grid_.center_y(j), sensor, r)) {
          const std::size_t cell = grid_.linear(i, j);
          mask[cell >> 6] |= std::uint64_t{1} << (cell & 63);
        }
      }
    }
  }
}

void CoverageModel::check_length(const ControlVector& cv) const {
  if (cv.size() != deployment_.size()) {
    throw DimensionError("control vector has " + std::to_string(cv.size()) + " bits, deployment has " +
                         std::to_string(deployment_.size()) + " sensors");
  }
}

std::vector<std::uint64_t> CoverageModel::covered_mask(const ControlVector& cv) const {
  check_length(cv);
  std::vector<std::uint64_t> out(words_, 0);
  for (std::size_t s = 0; s < masks_.size(); ++s) {
    if (!cv[s]) continue;
    const auto& m = masks_[s];
    for (std::size_t w = 0; w < words_; ++w) out[w] |= m[w];
  }
  return out;
}

std::size_t CoverageModel::covered_cells(const ControlVector& cv) const {
  std::size_t n = 0;
  for (auto w : covered_mask(cv)) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t CoverageModel::cells_of(std::size_t sensor) const {
  std::size_t n = 0;
  for (auto w : masks_.at(sensor)) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

double CoverageModel::covered_area(const ControlVector& cv) const {
  return static_cast<double>(covered_cells(cv)) * grid_.cell_area();
}

FitnessReport CoverageModel::evaluate(const ControlVector& cv, ObjectiveMode mode) const {
  const double area = covered_area(cv);
  return make_report(area, grid_.area(), cv.count(), deployment_.size(), mode);
}

HoleReport CoverageModel::find_holes(const ControlVector& cv) const {
  const auto mask = covered_mask(cv);
  const int nx = grid_.cells_x();
  const int ny = grid_.cells_y();
  HoleReport report;
  std::vector<std::uint8_t> seen(grid_.cell_count(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!mask_test(mask, grid_.linear(i, j))) report.uncovered_cells.push_back({i, j});
    }
  }
  for (const CellIndex& start : report.uncovered_cells) {
    if (seen[grid_.linear(start.i, start.j)]) continue;
    std::vector<CellIndex> component;
    std::deque<CellIndex> queue{start};
    seen[grid_.linear(start.i, start.j)] = 1;
    while (!queue.empty()) {
      const CellIndex c = queue.front();
      queue.pop_front();
      component.push_back(c);
      const CellIndex neighbours[4] = {{c.i - 1, c.j}, {c.i + 1, c.j}, {c.i, c.j - 1}, {c.i, c.j + 1}};
      for (const CellIndex& n : neighbours) {
        if (n.i < 0 || n.j < 0 || n.i >= nx || n.j >= ny) continue;
        const std::size_t cell = grid_.linear(n.i, n.j);
        if (seen[cell] || mask_test(mask, cell)) continue;
        seen[cell] = 1;
        queue.push_back(n);
      }
    }
    std::sort(component.begin(), component.end(),
              [](const CellIndex& a, const CellIndex& b) { return std::tie(a.j, a.i) < std::tie(b.j, b.i); });
    report.components.push_back(std::move(component));
  }
  return report;
}

double covered_area(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g) {
  return CoverageModel(d, g).covered_area(cv);
}

FitnessReport evaluate(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g,
                       ObjectiveMode mode) {
  return CoverageModel(d, g).evaluate(cv, mode);
}

HoleReport find_coverage_holes(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g) {
  return CoverageModel(d, g).find_holes(cv);
}

Deployment random_deployment(std::size_t n, double radius, const MonitoringGrid& g, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("random_deployment: n must be at least 1");
  RngStream rng(seed);
  std::vector<Sensor> sensors(n);
  for (auto& s : sensors) {
    s.x = rng.uniform01() * g.width();
    s.y = rng.uniform01() * g.height();
  }
  return Deployment(std::move(sensors), radius);
}

nlohmann::json deployment_to_json(const Deployment& d) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const Sensor& s : d.sensors()) sensors.push_back({s.x, s.y});
  return {{"radius", d.radius()}, {"sensors", std::move(sensors)}};
}

Deployment deployment_from_json(const nlohmann::json& j) {
  try {
    std::vector<Sensor> sensors;
    for (const auto& p : j.at("sensors")) {
      if (!p.is_array() || p.size() != 2) throw InvalidArgument("deployment: each sensor must be [x, y]");
      sensors.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return Deployment(std::move(sensors), j.at("radius").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("deployment: ") + e.what());
  }
}

void write_pgm(std::ostream& out, const std::vector<std::uint64_t>& mask, const MonitoringGrid& g) {
  out << "P2\n" << g.cells_x() << ' ' << g.cells_y() << "\n255\n";
  for (int j = g.cells_y() - 1; j >= 0; --j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      if (i > 0) out << ' ';
      out << (CoverageModel::mask_test(mask, g.linear(i, j)) ? 255 : 0);
    }
    out << '\n';
  }
}

void write_ascii(std::ostream& out, const std::vector<std::uint64_t>& mask, const MonitoringGrid& g) {
  for (int j = g.cells_y() - 1; j >= 0; --j) {
    for (int i = 0; i < g.cells_x(); ++i) out << (CoverageModel::mask_test(mask, g.linear(i, j)) ? '#' : '.');
    out << '\n';
  }
}

}  // namespace coverset
