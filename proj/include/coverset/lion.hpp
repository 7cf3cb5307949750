#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "coverset/framework.hpp"

namespace coverset {

struct LionParams {
  std::size_t population = 40;
  double nomad_fraction = 0.2;
  std::size_t prides = 4;
  double female_fraction = 0.8;   // within prides; nomads use the complement
  double mating_prob = 0.3;
  double mutation_rate = 0.05;
  double binarize_threshold = 0.5;

  void validate() const;
};

enum class Sex { Male, Female };

/// A lion's position in [0,1]^N plus its social role. pride < 0 marks a nomad.
struct Lion {
  std::vector<double> coords;
  int pride = -1;
  Sex sex = Sex::Female;
  std::optional<FitnessReport> fitness;

  bool is_nomad() const noexcept { return pride < 0; }
  double objective() const;
};

/// bit j = 1 iff coords[j] >= threshold.
ControlVector binarize(std::span<const double> coords, double threshold);

/// prey + u * pi * (prey - hunter) per component (fresh u each), clamped to [0,1].
std::vector<double> prey_escape(std::span<const double> prey, std::span<const double> hunter, double pi,
                                UniformSource& rng);

/// Wing hunter move: uniform between prey and the mirror point 2 prey - hunter.
double encircle_wing(double hunter, double prey, UniformSource& rng);
/// Center hunter move: uniform between hunter and prey.
double encircle_center(double hunter, double prey, UniformSource& rng);

/// Relative improvement (after - before) / before, floored at 0. A positive move
/// from 0 counts as 1.
double improvement_fraction(double before, double after);

/// Componentwise mean of the hunters' positions.
std::vector<double> hunting_prey(std::span<const Lion> hunters);

/// Cooperative hunt. Hunters are ranked by fitness; the best third (rounded up)
/// encircles from the center, the rest from the wings. Every hunter moves; each
/// one whose fitness improves makes the prey flee from its new position.
void hunt(std::vector<Lion>& hunters, std::vector<double>& prey, CoverageProblem& problem, double threshold,
          UniformSource& rng);

/// Pride females mate (with mating_prob) with the best nomad male, producing two
/// blended, mutated nomad cubs each. Everyone is then sorted by fitness and the
/// weakest nomads are removed until params.population lions remain.
void mate_sort_eliminate(std::vector<Lion>& lions, const LionParams& params, CoverageProblem& problem,
                         RngStream& rng);

class LionOptimizer final : public Optimizer {
 public:
  explicit LionOptimizer(LionParams params = {});

  std::string_view name() const override { return "lo"; }
  Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) override;
  Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) override;

  const std::vector<Lion>& lions() const noexcept { return lions_; }
  const LionParams& params() const noexcept { return params_; }

 private:
  /// Roles for a population of `size`: nomads first, then prides dealt round-robin.
  std::vector<Lion> assign_roles(std::size_t size) const;
  void evaluate(Lion& lion, CoverageProblem& problem) const;
  Population to_population(std::size_t generation) const;

  LionParams params_;
  std::vector<Lion> lions_;
};

}  // namespace coverset
