#include "coverset/ant_colony.hpp"

#include <algorithm>
#include <cmath>

#include "coverset/errors.hpp"

namespace coverset {

void AcoParams::validate() const {
  if (!(alpha >= 1.0)) throw InvalidArgument("ant colony: alpha must be >= 1");
  if (!(beta >= 1.0)) throw InvalidArgument("ant colony: beta must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("ant colony: rho must lie in (0, 1)");
  if (n_ants == 0) throw InvalidArgument("ant colony: n_ants must be positive");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) throw InvalidArgument("ant colony: need 0 < tau_min <= tau_max");
  if (!(initial_c > 0.0)) throw InvalidArgument("ant colony: initial trail must be positive");
}

PheromoneTable::PheromoneTable(std::size_t n_bits, double value, double tau_min, double tau_max)
    : tau_min_(tau_min), tau_max_(tau_max) {
  if (n_bits == 0) throw InvalidArgument("pheromone table: n_bits must be positive");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) throw InvalidArgument("pheromone table: need 0 < tau_min <= tau_max");
  const double v = std::clamp(value, tau_min, tau_max);
  tau_[0].assign(n_bits, v);
  tau_[1].assign(n_bits, v);
}

void PheromoneTable::set(int branch, std::size_t bit, double value) {
  tau_.at(static_cast<std::size_t>(branch)).at(bit) = std::clamp(value, tau_min_, tau_max_);
}

PheromoneTable init_pheromones(std::size_t n_bits, const AcoParams& p) {
  return PheromoneTable(n_bits, p.initial_c, p.tau_min, p.tau_max);
}

std::pair<double, double> transition_probability(double tau0, double tau1, double eta0, double eta1, double alpha,
                                                 double beta) {
  const double w0 = std::pow(tau0, alpha) * std::pow(eta0, beta);
  const double w1 = std::pow(tau1, alpha) * std::pow(eta1, beta);
  const double total = w0 + w1;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidState("transition probability: both branch weights vanish");
  }
  const double p1 = w1 / total;
  return {1.0 - p1, p1};
}

ControlVector construct_solution(const PheromoneTable& ph, const Deployment& d, const AcoParams& p, RngStream& rng,
                                 const VisibilityFn& visibility) {
  if (ph.size() != d.size()) {
    throw DimensionError("pheromone table has " + std::to_string(ph.size()) + " bits, deployment has " +
                         std::to_string(d.size()) + " sensors");
  }
  ControlVector cv(ph.size());
  for (std::size_t j = 0; j < ph.size(); ++j) {
    const auto [eta0, eta1] = visibility ? visibility(j) : std::pair{1.0, 1.0};
    const auto [p0, p1] = transition_probability(ph.at(0, j), ph.at(1, j), eta0, eta1, p.alpha, p.beta);
    (void)p0;
    cv.set(j, rng.bernoulli(p1));
  }
  return cv;
}

PheromoneTable update_pheromones(const PheromoneTable& ph, const ControlVector& elite, double elite_fitness,
                                 const AcoParams& p) {
  if (elite.size() != ph.size()) throw DimensionError("pheromone update: elite length does not match table");
  if (!(elite_fitness > 0.0)) throw InvalidArgument("pheromone update: elite fitness must be positive");
  const double deposit = p.deposit == DepositRule::Fitness ? elite_fitness : 1.0 / elite_fitness;
  PheromoneTable out = ph;
  for (std::size_t j = 0; j < ph.size(); ++j) {
    for (int b = 0; b < 2; ++b) {
      const bool on_path = (elite[j] ? 1 : 0) == b;
      out.set(b, j, p.rho * ph.at(b, j) + (on_path ? deposit : 0.0));
    }
  }
  return out;
}

const CandidateSolution& select_elite(const Population& offspring, RngStream& rng) {
  if (offspring.members.empty()) throw InvalidArgument("select_elite: no offspring");
  std::vector<double> weights;
  weights.reserve(offspring.size());
  for (const auto& m : offspring.members) weights.push_back(m.objective());
  return offspring.members[roulette_pick(weights, rng)];
}

PheromoneTable seed_from_population(const Population& pop, const AcoParams& p) {
  if (pop.members.empty()) throw InvalidArgument("seed_from_population: empty population");
  const std::size_t n = pop.dimension();
  std::vector<double> w0(n, 0.0);
  std::vector<double> w1(n, 0.0);
  for (const auto& m : pop.members) {
    const double f = m.objective();
    for (std::size_t j = 0; j < n; ++j) (m.bits[j] ? w1 : w0)[j] += f;
  }
  PheromoneTable table(n, p.initial_c, p.tau_min, p.tau_max);
  const double span = p.tau_max - p.tau_min;
  for (std::size_t j = 0; j < n; ++j) {
    const double total = w0[j] + w1[j];
    const double share1 = total > 0.0 ? w1[j] / total : 0.5;
    table.set(0, j, p.tau_min + span * (1.0 - share1));
    table.set(1, j, p.tau_min + span * share1);
  }
  return table;
}

BinaryAntColony::BinaryAntColony(AcoParams params, VisibilityFn visibility)
    : params_(params), visibility_(std::move(visibility)) {
  params_.validate();
}

const PheromoneTable& BinaryAntColony::pheromones() const {
  if (!table_) throw InvalidState("ant colony: trails not initialized");
  return *table_;
}

void BinaryAntColony::set_pheromones(PheromoneTable table) { table_ = std::move(table); }

Population BinaryAntColony::initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) {
  if (size == 0) throw InvalidArgument("ant colony: population size must be positive");
  table_ = init_pheromones(problem.dimension(), params_);
  Population pop;
  for (std::size_t k = 0; k < size; ++k) {
    pop.members.push_back({construct_solution(*table_, problem.deployment(), params_, rng, visibility_), {}, {}});
  }
  problem.evaluate(pop);
  return pop;
}

Population BinaryAntColony::step(const Population& pop, CoverageProblem& problem, RngStream& rng) {
  pop.check(problem.dimension());
  if (!table_ || table_->size() != problem.dimension()) table_ = init_pheromones(problem.dimension(), params_);
  Population current = pop;
  problem.evaluate(current);
  const CandidateSolution incumbent = current.best();

  Population next;
  next.generation = pop.generation;
  next.members.reserve(pop.size());
  for (std::size_t k = 0; k < pop.size(); ++k) {
    next.members.push_back({construct_solution(*table_, problem.deployment(), params_, rng, visibility_), {}, {}});
  }
  problem.evaluate(next);
  retain_elite(next, incumbent);

  const CandidateSolution& elite = select_elite(next, rng);
  if (elite.objective() > 0.0) table_ = update_pheromones(*table_, elite.bits, elite.objective(), params_);
  return next;
}

void IgaBacaSchedule::validate() const {
  if (iga_generations == 0 || baca_generations == 0 || outer_loops == 0) {
    throw InvalidArgument("iga-baca: phase lengths and outer loop count must be positive");
  }
}

IgaBaca::IgaBaca(IgaBacaSchedule schedule, AdaptiveGaParams ga, AcoParams aco)
    : schedule_(schedule), ga_(ga), ants_(aco) {
  schedule_.validate();
}

bool IgaBaca::in_ant_phase() const noexcept {
  const std::size_t cycle = schedule_.iga_generations + schedule_.baca_generations;
  return steps_taken_ % cycle >= schedule_.iga_generations;
}

Population IgaBaca::initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) {
  steps_taken_ = 0;
  return ga_.initialize(size, problem, rng);
}

Population IgaBaca::step(const Population& pop, CoverageProblem& problem, RngStream& rng) {
  const std::size_t cycle = schedule_.iga_generations + schedule_.baca_generations;
  const std::size_t phase_pos = steps_taken_ % cycle;
  Population next;
  if (phase_pos < schedule_.iga_generations) {
    next = ga_.step(pop, problem, rng);
  } else {
    if (phase_pos == schedule_.iga_generations) {
      Population seeded = pop;
      problem.evaluate(seeded);
      ants_.set_pheromones(seed_from_population(seeded, ants_.params()));
    }
    next = ants_.step(pop, problem, rng);
  }
  ++steps_taken_;
  return next;
}

RunOutcome iga_baca_run(const IgaBacaConfig& config, CoverageProblem& problem, RngStream& rng) {
  config.schedule.validate();
  IgaBaca optimizer(config.schedule, config.ga, config.aco);
  Population initial = optimizer.initialize(config.population, problem, rng);
  return run(optimizer, std::move(initial), Termination{config.schedule.total(), std::nullopt}, rng, problem);
}

}  // namespace coverset
