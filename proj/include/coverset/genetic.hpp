#pragma once

#include <span>
#include <utility>
#include <vector>

#include "coverset/framework.hpp"

namespace coverset {

/// Constants of the adaptive crossover/mutation rules plus the ranges the
/// resulting probabilities are clamped into.
struct AdaptiveGaParams {
  double k1 = 1.0;
  double k2 = 0.5;
  double k3 = 1.0;
  double k4 = 0.5;
  double pc_min = 0.5;
  double pc_max = 1.0;
  double pm_min = 0.001;
  double pm_max = 0.05;

  void validate() const;
};

// Raw rule values, before clamping:
//   Pc = k1 (f_max - f') / (f_max - f_avg)  if f' > f_avg, else k3
//   Pm = k2 (f_max - f)  / (f_max - f_avg)  if f  > f_avg, else k4
// A degenerate population (f_max == f_avg) takes the k3 / k4 branch.
double raw_crossover_prob(double f_prime, double f_max, double f_avg, const AdaptiveGaParams& p);
double raw_mutation_prob(double f, double f_max, double f_avg, const AdaptiveGaParams& p);
double adaptive_crossover_prob(double f_prime, double f_max, double f_avg, const AdaptiveGaParams& p);
double adaptive_mutation_prob(double f, double f_max, double f_avg, const AdaptiveGaParams& p);

/// Fitness-proportional probabilities. All-zero weights give a uniform distribution.
std::vector<double> roulette_probabilities(std::span<const double> weights);
std::size_t roulette_pick(std::span<const double> weights, RngStream& rng);

/// Member 0 of the result is the incumbent best; the other n-1 are roulette draws.
Population select_reproduce(const Population& pop, RngStream& rng);

/// Single-point crossover: children take a[0, cut) + b[cut, N) and b[0, cut) + a[cut, N).
std::pair<ControlVector, ControlVector> crossover_at(const ControlVector& a, const ControlVector& b, std::size_t cut);
/// With probability pc, crossover at a cut drawn uniformly from [1, N-1].
std::pair<ControlVector, ControlVector> crossover(const ControlVector& a, const ControlVector& b, double pc,
                                                  RngStream& rng);
ControlVector mutate(const ControlVector& v, double pm, RngStream& rng);

/// Adaptive GA: roulette reproduction, shuffled adjacent pairing, adaptive
/// crossover and mutation, then elitist replacement.
class AdaptiveGa final : public Optimizer {
 public:
  explicit AdaptiveGa(AdaptiveGaParams params = {});

  std::string_view name() const override { return "iga"; }
  Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) override;
  Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) override;

  const AdaptiveGaParams& params() const noexcept { return params_; }

 private:
  AdaptiveGaParams params_;
};

}  // namespace coverset
