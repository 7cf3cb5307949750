#include "coverset/pso.hpp"

#include <algorithm>

#include "coverset/errors.hpp"

namespace coverset {

void PsoParams::validate() const {
  if (!(w >= 0.0)) throw InvalidArgument("pso: inertia weight must be non-negative");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw InvalidArgument("pso: confidence factors must be non-negative");
  if (!(v_max > 0.0)) throw InvalidArgument("pso: v_max must be positive");
  if (swarm == 0) throw InvalidArgument("pso: swarm must be non-empty");
}

std::vector<double> update_velocity(std::span<const double> v, std::span<const double> x,
                                    std::span<const double> x_best, std::span<const double> x_gbest,
                                    const PsoParams& p, UniformSource& rng) {
  const std::size_t n = v.size();
  if (x.size() != n || x_best.size() != n || x_gbest.size() != n) {
    throw DimensionError("update_velocity: vector dimensions differ");
  }
  const double r1 = rng.uniform01();
  const double r2 = rng.uniform01();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double raw = p.w * v[j] + p.c1 * r1 * (x_best[j] - x[j]) + p.c2 * r2 * (x_gbest[j] - x[j]);
    out[j] = std::clamp(raw, -p.v_max, p.v_max);
  }
  return out;
}

std::vector<double> update_position(std::span<const double> x, std::span<const double> v_new) {
  if (x.size() != v_new.size()) throw DimensionError("update_position: vector dimensions differ");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = std::clamp(x[j] + v_new[j], 0.0, 1.0);
  return out;
}

ControlVector binarize_particle(std::span<const double> x, ParticleBinarization mode, RngStream& rng) {
  ControlVector cv(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0 && x[j] <= 1.0)) {
      throw InvalidArgument("binarize_particle: component " + std::to_string(j) + " outside [0, 1]");
    }
    cv.set(j, mode == ParticleBinarization::Threshold ? x[j] >= 0.5 : rng.bernoulli(x[j]));
  }
  return cv;
}

BinaryPso::BinaryPso(PsoParams params) : params_(params) { params_.validate(); }

void BinaryPso::reset_memory(const Population& pop, CoverageProblem& problem) {
  const std::size_t n = problem.dimension();
  velocity_.assign(pop.size(), std::vector<double>(n, 0.0));
  personal_best_ = pop.members;
  for (auto& m : personal_best_) {
    if (m.position.empty()) {
      m.position.resize(n);
      for (std::size_t j = 0; j < n; ++j) m.position[j] = m.bits[j] ? 1.0 : 0.0;
    }
  }
  global_best_ = pop.best();
}

Population BinaryPso::initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) {
  const std::size_t n = problem.dimension();
  Population pop;
  for (std::size_t k = 0; k < size; ++k) {
    std::vector<double> x(n);
    for (double& c : x) c = rng.uniform01();
    ControlVector bits = binarize_particle(x, params_.binarize, rng);
    pop.members.push_back({std::move(bits), std::move(x), std::nullopt});
  }
  problem.evaluate(pop);
  reset_memory(pop, problem);
  for (auto& v : velocity_) {
    for (double& c : v) c = rng.uniform(-params_.v_max, params_.v_max);
  }
  return pop;
}

Population BinaryPso::step(const Population& pop, CoverageProblem& problem, RngStream& rng) {
  pop.check(problem.dimension());
  Population current = pop;
  problem.evaluate(current);
  for (auto& m : current.members) {
    if (m.position.empty()) throw InvalidState("pso: members need continuous positions");
  }
  if (velocity_.size() != current.size()) reset_memory(current, problem);
  const CandidateSolution incumbent = current.best();
  if (!global_best_ || incumbent.objective() > global_best_->objective()) global_best_ = incumbent;

  Population next;
  next.generation = pop.generation;
  next.members.reserve(current.size());
  for (std::size_t k = 0; k < current.size(); ++k) {
    const auto& x = current.members[k].position;
    velocity_[k] = update_velocity(velocity_[k], x, personal_best_[k].position, global_best_->position, params_, rng);
    std::vector<double> moved = update_position(x, velocity_[k]);
    ControlVector bits = binarize_particle(moved, params_.binarize, rng);
    next.members.push_back({std::move(bits), std::move(moved), std::nullopt});
  }
  problem.evaluate(next);

  for (std::size_t k = 0; k < next.size(); ++k) {
    if (next.members[k].objective() > personal_best_[k].objective()) personal_best_[k] = next.members[k];
    if (next.members[k].objective() > global_best_->objective()) global_best_ = next.members[k];
  }
  if (auto replaced = retain_elite(next, incumbent)) velocity_[*replaced].assign(problem.dimension(), 0.0);
  return next;
}

}  // namespace coverset
