#include "coverset/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <thread>

#include "coverset/errors.hpp"

namespace coverset {

double CandidateSolution::objective() const {
  if (!fitness) throw InvalidState("candidate solution has not been evaluated");
  return fitness->objective;
}

std::size_t Population::best_index() const {
  if (members.empty()) throw InvalidState("empty population");
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].objective() > members[best].objective()) best = i;
  }
  return best;
}

std::size_t Population::worst_index() const {
  if (members.empty()) throw InvalidState("empty population");
  std::size_t worst = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].objective() < members[worst].objective()) worst = i;
  }
  return worst;
}

void Population::check(std::size_t n) const {
  if (members.empty()) throw DimensionError("population is empty");
  for (const auto& m : members) {
    if (m.bits.size() != n) {
      throw DimensionError("population member has " + std::to_string(m.bits.size()) + " bits, expected " +
                           std::to_string(n));
    }
    if (!m.position.empty() && m.position.size() != n) {
      throw DimensionError("population member position has wrong dimension");
    }
  }
}

CoverageProblem::CoverageProblem(Deployment deployment, MonitoringGrid grid, ObjectiveMode mode, unsigned threads)
    : model_(std::move(deployment), grid), mode_(mode), threads_(std::max(1U, threads)) {}

std::string CoverageProblem::key(const ControlVector& cv) {
  const auto& raw = cv.raw();
  return std::string(raw.begin(), raw.end());
}

FitnessReport CoverageProblem::evaluate(const ControlVector& cv) {
  auto k = key(cv);
  if (auto it = cache_.find(k); it != cache_.end()) return it->second;
  FitnessReport report = model_.evaluate(cv, mode_);
  cache_.emplace(std::move(k), report);
  return report;
}

void CoverageProblem::evaluate(Population& pop) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    auto& m = pop.members[i];
    if (m.fitness) continue;
    if (m.bits.size() != dimension()) {
      throw DimensionError("genome length " + std::to_string(m.bits.size()) + " does not match " +
                           std::to_string(dimension()) + " sensors");
    }
    if (auto it = cache_.find(key(m.bits)); it != cache_.end()) {
      m.fitness = it->second;
    } else {
      pending.push_back(i);
    }
  }
  if (pending.empty()) return;

  std::vector<FitnessReport> results(pending.size());
  const std::size_t workers = std::min<std::size_t>(threads_, pending.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < pending.size(); ++k) results[k] = model_.evaluate(pop.members[pending[k]].bits, mode_);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < pending.size(); k += workers) {
          results[k] = model_.evaluate(pop.members[pending[k]].bits, mode_);
        }
      });
    }
  }
  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto& m = pop.members[pending[k]];
    m.fitness = results[k];
    cache_.emplace(key(m.bits), results[k]);
  }
}

unsigned threads_from_environment() {
  const char* value = std::getenv("COVERSET_THREADS");
  if (value == nullptr || *value == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || n < 0) {
    throw ConfigError(std::string("COVERSET_THREADS must be a non-negative integer, got '") + value + "'");
  }
  if (n == 0) return std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(n);
}

void ConvergenceTrace::append(const TraceRecord& record) {
  if (!records_.empty()) {
    if (record.generation <= records_.back().generation) {
      throw InvariantViolation("trace generations must be strictly increasing");
    }
    if (record.best_combined < records_.back().best_combined) {
      throw InvariantViolation("trace best value decreased at generation " + std::to_string(record.generation));
    }
  }
  records_.push_back(record);
}

const TraceRecord& ConvergenceTrace::at_generation(std::size_t generation) const {
  auto it = std::upper_bound(records_.begin(), records_.end(), generation,
                             [](std::size_t g, const TraceRecord& r) { return g < r.generation; });
  if (it == records_.begin()) throw InvalidArgument("no trace record at or before generation " + std::to_string(generation));
  return *std::prev(it);
}

void ConvergenceTrace::write_csv(std::ostream& out, bool include_wallclock) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << "generation,best_combined,best_f1,best_active,wallclock_ms\n";
  buf << std::setprecision(17);
  for (const auto& r : records_) {
    buf << r.generation << ',' << r.best_combined << ',' << r.best_f1 << ',' << r.best_active << ','
        << (include_wallclock ? r.wallclock_ms : 0.0) << '\n';
  }
  out << buf.str();
}

std::optional<std::size_t> retain_elite(Population& pop, const CandidateSolution& incumbent) {
  if (pop.members.empty()) throw InvalidState("retain_elite: empty population");
  if (pop.best().objective() >= incumbent.objective()) return std::nullopt;
  const std::size_t worst = pop.worst_index();
  pop.members[worst] = incumbent;
  return worst;
}

Population random_binary_population(std::size_t size, std::size_t n_bits, RngStream& rng) {
  if (size == 0 || n_bits == 0) throw InvalidArgument("random population needs positive size and dimension");
  Population pop;
  pop.members.reserve(size);
  for (std::size_t k = 0; k < size; ++k) {
    ControlVector cv(n_bits);
    for (std::size_t j = 0; j < n_bits; ++j) cv.set(j, rng.bernoulli(0.5));
    pop.members.push_back({std::move(cv), {}, std::nullopt});
  }
  return pop;
}

RunOutcome run(Optimizer& optimizer, Population initial, const Termination& termination, RngStream& rng,
               CoverageProblem& problem) {
  if (termination.max_generations == 0) throw InvalidArgument("termination: max_generations must be at least 1");
  initial.check(problem.dimension());
  problem.evaluate(initial);

  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.best = initial.best();
  Population pop = std::move(initial);

  for (std::size_t t = 1; t <= termination.max_generations; ++t) {
    const std::size_t size_before = pop.size();
    Population next = optimizer.step(pop, problem, rng);
    if (next.size() != size_before) {
      throw InvariantViolation(std::string(optimizer.name()) + ": step changed the population size");
    }
    next.generation = pop.generation + 1;
    const CandidateSolution& gen_best = next.best();
    if (gen_best.objective() < outcome.best.objective()) {
      throw InvariantViolation(std::string(optimizer.name()) + ": step lost the incumbent best");
    }
    if (gen_best.objective() > outcome.best.objective()) outcome.best = gen_best;
    pop = std::move(next);

    const auto& fit = *outcome.best.fitness;
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    outcome.trace.append({t, fit.objective, fit.f1, fit.active_count, ms});
    if (termination.target_fitness && fit.objective >= *termination.target_fitness) break;
  }
  outcome.final_population = std::move(pop);
  return outcome;
}

}  // namespace coverset
