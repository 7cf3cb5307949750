#pragma once

#include <span>
#include <vector>

#include "coverset/framework.hpp"

namespace coverset {

enum class ParticleBinarization {
  Threshold,   // bit = x >= 0.5
  Bernoulli,   // bit ~ Bernoulli(x)
};

struct PsoParams {
  double w = 0.7;
  double c1 = 1.5;
  double c2 = 1.5;
  double v_max = 0.5;
  std::size_t swarm = 40;
  ParticleBinarization binarize = ParticleBinarization::Threshold;

  void validate() const;
};

/// v' = w v + c1 r1 (x_best - x) + c2 r2 (x_gbest - x), clamped to [-v_max, v_max].
/// r1 and r2 are drawn once per call, in that order.
std::vector<double> update_velocity(std::span<const double> v, std::span<const double> x,
                                    std::span<const double> x_best, std::span<const double> x_gbest,
                                    const PsoParams& p, UniformSource& rng);

/// x' = x + v, clamped to [0,1].
std::vector<double> update_position(std::span<const double> x, std::span<const double> v_new);

ControlVector binarize_particle(std::span<const double> x, ParticleBinarization mode, RngStream& rng);

class BinaryPso final : public Optimizer {
 public:
  explicit BinaryPso(PsoParams params = {});

  std::string_view name() const override { return "pso"; }
  Population initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) override;
  Population step(const Population& pop, CoverageProblem& problem, RngStream& rng) override;

  const std::vector<std::vector<double>>& velocities() const noexcept { return velocity_; }

 private:
  void reset_memory(const Population& pop, CoverageProblem& problem);

  PsoParams params_;
  std::vector<std::vector<double>> velocity_;
  std::vector<CandidateSolution> personal_best_;
  std::optional<CandidateSolution> global_best_;
};

}  // namespace coverset
