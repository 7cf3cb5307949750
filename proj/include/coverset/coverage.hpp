#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace coverset {

/// Rectangular monitoring area split into cells_x by cells_y equal cells. Each
/// cell is represented by its center point ((i + 0.5) dx, (j + 0.5) dy).
class MonitoringGrid {
 public:
  MonitoringGrid(double width, double height, int cells_x, int cells_y);

  /// 100 m x 100 m with 1 m cells.
  static MonitoringGrid standard() { return {100.0, 100.0, 100, 100}; }

  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  int cells_x() const noexcept { return cells_x_; }
  int cells_y() const noexcept { return cells_y_; }
  double cell_dx() const noexcept { return width_ / cells_x_; }
  double cell_dy() const noexcept { return height_ / cells_y_; }
  double cell_area() const noexcept { return cell_dx() * cell_dy(); }
  double area() const noexcept { return width_ * height_; }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(cells_x_) * static_cast<std::size_t>(cells_y_);
  }

  double center_x(int i) const noexcept { return (i + 0.5) * cell_dx(); }
  double center_y(int j) const noexcept { return (j + 0.5) * cell_dy(); }

  /// Row-major linear index, rows along y.
  std::size_t linear(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(cells_x_) + static_cast<std::size_t>(i);
  }

  bool contains(double x, double y) const noexcept {
    return x >= 0.0 && x <= width_ && y >= 0.0 && y <= height_;
  }

  bool operator==(const MonitoringGrid&) const = default;

 private:
  double width_;
  double height_;
  int cells_x_;
  int cells_y_;
};

struct Sensor {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Sensor&) const = default;
};

/// Fixed sensor positions sharing one sensing radius. Bit i of every control
/// vector refers to sensors()[i].
class Deployment {
 public:
  Deployment(std::vector<Sensor> sensors, double radius);

  const std::vector<Sensor>& sensors() const noexcept { return sensors_; }
  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return sensors_.size(); }

  /// Throws InvalidArgument when a sensor lies outside the grid's area.
  void check_within(const MonitoringGrid& grid) const;

  bool operator==(const Deployment&) const = default;

 private:
  std::vector<Sensor> sensors_;
  double radius_;
};

/// Activation string: bit i = 1 switches sensor i on.
class ControlVector {
 public:
  ControlVector() = default;
  explicit ControlVector(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  explicit ControlVector(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1' characters.
  static ControlVector from_string(std::string_view text);
  std::string to_string() const;

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
  void flip(std::size_t i) { bits_.at(i) ^= 1; }
  std::size_t count() const noexcept;

  const std::vector<std::uint8_t>& raw() const noexcept { return bits_; }

  bool operator==(const ControlVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// How the two objectives are combined into the value optimizers maximize.
enum class ObjectiveMode {
  /// f1^2 / f2, 0 for an empty active set. Default.
  CoverageSquaredOverUse,
  /// max(f1, 1 - f2). Kept for comparison; an empty active set scores 1.
  MaxOfObjectives,
};

ObjectiveMode parse_objective_mode(std::string_view name);
std::string_view to_string(ObjectiveMode mode);

struct FitnessReport {
  double covered_area = 0.0;   // m^2
  double f1 = 0.0;             // coverage rate
  double f2 = 0.0;             // node-use rate
  double combined = 0.0;       // f1^2 / f2, or 0 when nothing is active
  double objective = 0.0;      // value under the selected ObjectiveMode
  std::size_t active_count = 0;

  bool operator==(const FitnessReport&) const = default;
};

struct CellIndex {
  int i = 0;
  int j = 0;

  bool operator==(const CellIndex&) const = default;
  auto operator<=>(const CellIndex&) const = default;
};

struct HoleReport {
  std::vector<CellIndex> uncovered_cells;              // scan order: j major, i minor
  std::vector<std::vector<CellIndex>> components;      // 4-connected, in discovery order
};

/// Euclidean disk test with a closed boundary.
bool is_covered(double px, double py, const Sensor& sensor, double radius) noexcept;

/// Precomputed per-sensor cell masks over one grid. Evaluating a control vector
/// ORs the masks of the active sensors and counts set bits.
class CoverageModel {
 public:
  CoverageModel(Deployment deployment, MonitoringGrid grid);

  const Deployment& deployment() const noexcept { return deployment_; }
  const MonitoringGrid& grid() const noexcept { return grid_; }
  std::size_t sensor_count() const noexcept { return deployment_.size(); }

  /// One bit per cell (linear index), set where an active sensor covers the center.
  std::vector<std::uint64_t> covered_mask(const ControlVector& cv) const;
  std::size_t covered_cells(const ControlVector& cv) const;
  /// Cells covered by sensor i alone.
  std::size_t cells_of(std::size_t sensor) const;

  double covered_area(const ControlVector& cv) const;
  FitnessReport evaluate(const ControlVector& cv,
                         ObjectiveMode mode = ObjectiveMode::CoverageSquaredOverUse) const;
  HoleReport find_holes(const ControlVector& cv) const;

  static bool mask_test(const std::vector<std::uint64_t>& mask, std::size_t cell) noexcept {
    return (mask[cell >> 6] >> (cell & 63)) & 1U;
  }

 private:
  void check_length(const ControlVector& cv) const;

  Deployment deployment_;
  MonitoringGrid grid_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> masks_;
};

double covered_area(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g);
FitnessReport evaluate(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g,
                       ObjectiveMode mode = ObjectiveMode::CoverageSquaredOverUse);
HoleReport find_coverage_holes(const Deployment& d, const ControlVector& cv, const MonitoringGrid& g);

/// n sensors uniform over [0, width) x [0, height); deterministic for a seed.
Deployment random_deployment(std::size_t n, double radius, const MonitoringGrid& g, std::uint64_t seed);

/// Scalarizes already-computed rates.
FitnessReport make_report(double covered_area, double total_area, std::size_t active,
                          std::size_t total_sensors, ObjectiveMode mode);

// Serialization: {"radius": r, "sensors": [[x, y], ...]}
nlohmann::json deployment_to_json(const Deployment& d);
Deployment deployment_from_json(const nlohmann::json& j);

// Coverage maps. The top row of the output is the highest-y row of the grid.
void write_pgm(std::ostream& out, const std::vector<std::uint64_t>& mask, const MonitoringGrid& g);
void write_ascii(std::ostream& out, const std::vector<std::uint64_t>& mask, const MonitoringGrid& g);

}  // namespace coverset
