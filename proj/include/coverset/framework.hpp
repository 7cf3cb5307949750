#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coverset/coverage.hpp"
#include "coverset/rng.hpp"

namespace coverset {

/// One member of a population. Discrete optimizers only use `bits`; continuous
/// ones keep `position` in [0,1]^N and store its binarization in `bits`.
struct CandidateSolution {
  ControlVector bits;
  std::vector<double> position;
  std::optional<FitnessReport> fitness;

  bool evaluated() const noexcept { return fitness.has_value(); }
  /// Objective value; throws InvalidState when unevaluated.
  double objective() const;
};

struct Population {
  std::vector<CandidateSolution> members;
  std::size_t generation = 0;

  std::size_t size() const noexcept { return members.size(); }
  std::size_t dimension() const noexcept { return members.empty() ? 0 : members.front().bits.size(); }
  /// Index of the highest objective; lowest index wins ties.
  std::size_t best_index() const;
  std::size_t worst_index() const;
  const CandidateSolution& best() const { return members[best_index()]; }
  /// Throws DimensionError unless non-empty with every genome of length n.
  void check(std::size_t n) const;
};

/// Evaluation context for one run: a coverage model, the objective mode and a
/// memo of fitness reports keyed by genome bits. Evaluation is pure, so entries
/// are never invalidated.
class CoverageProblem {
 public:
  CoverageProblem(Deployment deployment, MonitoringGrid grid,
                  ObjectiveMode mode = ObjectiveMode::CoverageSquaredOverUse, unsigned threads = 1);

  const CoverageModel& model() const noexcept { return model_; }
  const Deployment& deployment() const noexcept { return model_.deployment(); }
  const MonitoringGrid& grid() const noexcept { return model_.grid(); }
  ObjectiveMode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept { return model_.sensor_count(); }
  std::size_t cache_size() const noexcept { return cache_.size(); }
  unsigned threads() const noexcept { return threads_; }

  FitnessReport evaluate(const ControlVector& cv);

  /// Fills in every missing fitness. Uncached genomes may be evaluated on several
  /// threads; results are merged in member order.
  void evaluate(Population& pop);

 private:
  static std::string key(const ControlVector& cv);

  CoverageModel model_;
  ObjectiveMode mode_;
  unsigned threads_;
  std::unordered_map<std::string, FitnessReport> cache_;
};

/// Thread count from COVERSET_THREADS: unset -> 1, 0 -> hardware concurrency.
unsigned threads_from_environment();

struct Termination {
  std::size_t max_generations = 250;
  std::optional<double> target_fitness;
};

struct TraceRecord {
  std::size_t generation = 0;
  double best_combined = 0.0;
  double best_f1 = 0.0;
  std::size_t best_active = 0;
  double wallclock_ms = 0.0;
};

/// Best-so-far record per generation. append() enforces strictly increasing
/// generations and non-decreasing best value.
class ConvergenceTrace {
 public:
  void append(const TraceRecord& record);

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }
  const TraceRecord& back() const { return records_.back(); }

  /// Record in force at `generation` (the last one at or before it).
  const TraceRecord& at_generation(std::size_t generation) const;

  /// Header "generation,best_combined,best_f1,best_active,wallclock_ms". Values
  /// use the classic locale; wallclock is written as 0 unless requested.
  void write_csv(std::ostream& out, bool include_wallclock = false) const;

 private:
  std::vector<TraceRecord> records_;
};

/// Uniform state-advance contract. Optimizers may carry auxiliary state (trails,
/// velocities, pride roles) aligned with the population they last returned.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual std::string_view name() const = 0;
  virtual Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) = 0;
  /// Returns the next generation: same size, every member evaluated, and the
  /// incumbent best of `pop` still present.
  virtual Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) = 0;
};

struct RunOutcome {
  CandidateSolution best;
  ConvergenceTrace trace;
  Population final_population;
};

/// Drives step() until max_generations or the target is reached. One trace record
/// per generation.
RunOutcome run(Optimizer& optimizer, Population initial, const Termination& termination, RngStream& rng,
               CoverageProblem& problem);

/// Places `incumbent` over the worst member unless something at least as good is
/// already present. Returns the replaced index, or nullopt.
std::optional<std::size_t> retain_elite(Population& pop, const CandidateSolution& incumbent);

Population random_binary_population(std::size_t size, std::size_t n_bits, RngStream& rng);

}  // namespace coverset
