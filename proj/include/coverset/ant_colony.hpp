#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "coverset/framework.hpp"
#include "coverset/genetic.hpp"

namespace coverset {

/// How much trail the elite path receives per update.
enum class DepositRule {
  /// delta = f_best. Rewards high fitness; the default for a maximized objective.
  Fitness,
  /// delta = 1 / f_best. The cost-minimization form.
  InverseFitness,
};

struct AcoParams {
  double alpha = 1.0;
  double beta = 6.0;
  double rho = 0.8;          // persistence; 1 - rho evaporates each update
  std::size_t n_ants = 40;
  double initial_c = 10.0;
  double tau_min = 0.01;
  double tau_max = 10.0;
  DepositRule deposit = DepositRule::Fitness;

  void validate() const;
};

/// Trail intensities of the two-branch digraph: row b holds the trail on the
/// branch that sets bit j to b. Entries stay inside [tau_min, tau_max].
class PheromoneTable {
 public:
  PheromoneTable(std::size_t n_bits, double value, double tau_min, double tau_max);

  std::size_t size() const noexcept { return tau_[0].size(); }
  double tau_min() const noexcept { return tau_min_; }
  double tau_max() const noexcept { return tau_max_; }
  double at(int branch, std::size_t bit) const { return tau_.at(static_cast<std::size_t>(branch)).at(bit); }
  /// Stores the value clamped into the bounds.
  void set(int branch, std::size_t bit, double value);

 private:
  std::array<std::vector<double>, 2> tau_;
  double tau_min_;
  double tau_max_;
};

/// Visibility (eta0, eta1) of the two branches at a bit. Empty means 1 for both.
using VisibilityFn = std::function<std::pair<double, double>(std::size_t bit)>;

PheromoneTable init_pheromones(std::size_t n_bits, const AcoParams& p);

/// p_b = tau_b^alpha eta_b^beta / sum over both branches.
std::pair<double, double> transition_probability(double tau0, double tau1, double eta0, double eta1, double alpha,
                                                 double beta);

/// One ant walk: every bit drawn independently from its branch probabilities.
ControlVector construct_solution(const PheromoneTable& ph, const Deployment& d, const AcoParams& p, RngStream& rng,
                                 const VisibilityFn& visibility = {});

/// tau <- rho tau everywhere, plus the deposit on the elite's branches, then clamp.
PheromoneTable update_pheromones(const PheromoneTable& ph, const ControlVector& elite, double elite_fitness,
                                 const AcoParams& p);

/// Member drawn with probability f(x_i) / sum_k f(x_k); uniform if every f is 0.
const CandidateSolution& select_elite(const Population& offspring, RngStream& rng);

/// Trails from fitness-weighted bit frequencies: weight(b, j) is the summed fitness
/// of members with bit j = b; each bit's pair is mapped linearly so that a full
/// share lands on tau_max and no share on tau_min.
PheromoneTable seed_from_population(const Population& pop, const AcoParams& p);

/// Binary ant colony with Max-Min trails.
class BinaryAntColony final : public Optimizer {
 public:
  explicit BinaryAntColony(AcoParams params = {}, VisibilityFn visibility = {});

  std::string_view name() const override { return "baca"; }
  Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) override;
  Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) override;

  const PheromoneTable& pheromones() const;
  void set_pheromones(PheromoneTable table);
  const AcoParams& params() const noexcept { return params_; }

 private:
  AcoParams params_;
  VisibilityFn visibility_;
  std::optional<PheromoneTable> table_;
};

struct IgaBacaSchedule {
  std::size_t iga_generations = 125;
  std::size_t baca_generations = 125;
  std::size_t outer_loops = 1;

  void validate() const;
  std::size_t total() const noexcept { return outer_loops * (iga_generations + baca_generations); }
};

/// Alternates adaptive-GA and ant-colony phases. Entering an ant phase seeds the
/// trails from the current population; the cycle then repeats.
class IgaBaca final : public Optimizer {
 public:
  IgaBaca(IgaBacaSchedule schedule, AdaptiveGaParams ga = {}, AcoParams aco = {});

  std::string_view name() const override { return "iga-baca"; }
  Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) override;
  Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) override;

  /// True while the next step belongs to an ant phase.
  bool in_ant_phase() const noexcept;

 private:
  IgaBacaSchedule schedule_;
  AdaptiveGa ga_;
  BinaryAntColony ants_;
  std::size_t steps_taken_ = 0;
};

struct IgaBacaConfig {
  IgaBacaSchedule schedule;
  AdaptiveGaParams ga;
  AcoParams aco;
  std::size_t population = 40;
};

/// Runs the combined schedule to completion (schedule.total() generations).
RunOutcome iga_baca_run(const IgaBacaConfig& config, CoverageProblem& problem, RngStream& rng);

}  // namespace coverset
