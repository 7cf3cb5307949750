#include "coverset/lion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coverset/errors.hpp"

namespace coverset {

void LionParams::validate() const {
  if (population < 4) throw InvalidArgument("lion optimizer: population must be at least 4");
  if (prides < 1) throw InvalidArgument("lion optimizer: at least one pride is required");
  for (double f : {nomad_fraction, female_fraction, binarize_threshold}) {
    if (!(f > 0.0 && f < 1.0)) {
      throw InvalidArgument("lion optimizer: nomad/female fractions and threshold must lie in (0, 1)");
    }
  }
  if (!(mating_prob >= 0.0 && mating_prob <= 1.0) || !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw InvalidArgument("lion optimizer: mating and mutation rates must lie in [0, 1]");
  }
  const auto nomads = static_cast<std::size_t>(std::lround(static_cast<double>(population) * nomad_fraction));
  if (std::max<std::size_t>(nomads, 1) + prides > population) {
    throw InvalidArgument("lion optimizer: too many prides for the population size");
  }
}

double Lion::objective() const {
  if (!fitness) throw InvalidState("lion has not been evaluated");
  return fitness->objective;
}

ControlVector binarize(std::span<const double> coords, double threshold) {
  ControlVector cv(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (!(coords[j] >= 0.0 && coords[j] <= 1.0)) {
      throw InvalidArgument("binarize: coordinate " + std::to_string(j) + " outside [0, 1]");
    }
    cv.set(j, coords[j] >= threshold);
  }
  return cv;
}

std::vector<double> prey_escape(std::span<const double> prey, std::span<const double> hunter, double pi,
                                UniformSource& rng) {
  if (prey.size() != hunter.size()) throw DimensionError("prey_escape: prey and hunter dimensions differ");
  if (!(pi >= 0.0)) throw InvalidArgument("prey_escape: improvement fraction must be non-negative");
  std::vector<double> out(prey.size());
  for (std::size_t j = 0; j < prey.size(); ++j) {
    out[j] = std::clamp(prey[j] + rng.uniform01() * pi * (prey[j] - hunter[j]), 0.0, 1.0);
  }
  return out;
}

double encircle_wing(double hunter, double prey, UniformSource& rng) {
  const double mirror = 2.0 * prey - hunter;
  if (mirror == prey) return prey;
  const double lo = std::min(mirror, prey);
  const double hi = std::max(mirror, prey);
  return std::clamp(rng.uniform(lo, hi), 0.0, 1.0);
}

double encircle_center(double hunter, double prey, UniformSource& rng) {
  if (hunter == prey) return hunter;
  return rng.uniform(std::min(hunter, prey), std::max(hunter, prey));
}

double improvement_fraction(double before, double after) {
  if (!(after > before)) return 0.0;
  if (!(before > 0.0)) return 1.0;
  return (after - before) / before;
}

std::vector<double> hunting_prey(std::span<const Lion> hunters) {
  if (hunters.empty()) throw InvalidArgument("hunt: no hunters");
  std::vector<double> prey(hunters.front().coords.size(), 0.0);
  for (const Lion& h : hunters) {
    if (h.coords.size() != prey.size()) throw DimensionError("hunt: hunters differ in dimension");
    for (std::size_t j = 0; j < prey.size(); ++j) prey[j] += h.coords[j];
  }
  for (double& v : prey) v /= static_cast<double>(hunters.size());
  return prey;
}

void hunt(std::vector<Lion>& hunters, std::vector<double>& prey, CoverageProblem& problem, double threshold,
          UniformSource& rng) {
  if (hunters.empty()) throw InvalidArgument("hunt: no hunters");
  for (Lion& h : hunters) {
    if (h.coords.size() != prey.size()) throw DimensionError("hunt: hunter and prey dimensions differ");
    if (!h.fitness) h.fitness = problem.evaluate(binarize(h.coords, threshold));
  }

  std::vector<std::size_t> rank(hunters.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(),
                   [&](std::size_t a, std::size_t b) { return hunters[a].objective() > hunters[b].objective(); });
  const std::size_t centre_count = (hunters.size() + 2) / 3;

  for (std::size_t r = 0; r < rank.size(); ++r) {
    Lion& h = hunters[rank[r]];
    const bool centre = r < centre_count;
    std::vector<double> moved(h.coords.size());
    for (std::size_t j = 0; j < moved.size(); ++j) {
      moved[j] = centre ? encircle_center(h.coords[j], prey[j], rng) : encircle_wing(h.coords[j], prey[j], rng);
    }
    if (moved == h.coords) continue;
    const double before = h.objective();
    h.coords = std::move(moved);
    h.fitness = problem.evaluate(binarize(h.coords, threshold));
    const double pi = improvement_fraction(before, h.objective());
    if (pi > 0.0) prey = prey_escape(prey, h.coords, pi, rng);
  }
}

void mate_sort_eliminate(std::vector<Lion>& lions, const LionParams& params, CoverageProblem& problem,
                         RngStream& rng) {
  if (lions.size() < 4) throw InvalidArgument("mate_sort_eliminate: population below 4");
  for (Lion& l : lions) {
    if (!l.fitness) l.fitness = problem.evaluate(binarize(l.coords, params.binarize_threshold));
  }

  const Lion* best_nomad_male = nullptr;
  for (const Lion& l : lions) {
    if (l.is_nomad() && l.sex == Sex::Male && (!best_nomad_male || l.objective() > best_nomad_male->objective())) {
      best_nomad_male = &l;
    }
  }

  std::vector<Lion> cubs;
  if (best_nomad_male != nullptr) {
    const std::vector<double> father = best_nomad_male->coords;
    for (const Lion& mother : lions) {
      if (mother.is_nomad() || mother.sex != Sex::Female) continue;
      if (!rng.bernoulli(params.mating_prob)) continue;
      const double blend = rng.uniform01();
      Lion daughter{std::vector<double>(father.size()), -1, Sex::Female, std::nullopt};
      Lion son{std::vector<double>(father.size()), -1, Sex::Male, std::nullopt};
      for (std::size_t j = 0; j < father.size(); ++j) {
        daughter.coords[j] = blend * mother.coords[j] + (1.0 - blend) * father[j];
        son.coords[j] = (1.0 - blend) * mother.coords[j] + blend * father[j];
      }
      for (Lion* cub : {&daughter, &son}) {
        for (double& c : cub->coords) {
          if (rng.bernoulli(params.mutation_rate)) c = rng.uniform01();
          c = std::clamp(c, 0.0, 1.0);
        }
        cub->fitness = problem.evaluate(binarize(cub->coords, params.binarize_threshold));
      }
      cubs.push_back(std::move(daughter));
      cubs.push_back(std::move(son));
    }
  }
  for (Lion& cub : cubs) lions.push_back(std::move(cub));

  std::stable_sort(lions.begin(), lions.end(),
                   [](const Lion& a, const Lion& b) { return a.objective() > b.objective(); });

  // Drop the weakest nomads; the best lion sits at index 0 and is never reached
  // while another nomad remains below it.
  for (std::size_t i = lions.size(); i-- > 1 && lions.size() > params.population;) {
    if (lions[i].is_nomad()) lions.erase(lions.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

LionOptimizer::LionOptimizer(LionParams params) : params_(params) { params_.validate(); }

std::vector<Lion> LionOptimizer::assign_roles(std::size_t size) const {
  if (size < 4) throw InvalidArgument("lion optimizer: population must be at least 4");
  std::size_t nomads = static_cast<std::size_t>(std::lround(static_cast<double>(size) * params_.nomad_fraction));
  nomads = std::clamp<std::size_t>(nomads, 1, size - std::min(size - 1, params_.prides));
  const std::size_t residents = size - nomads;
  const std::size_t prides = std::min(params_.prides, residents);

  std::vector<Lion> lions(size);
  const auto nomad_females =
      static_cast<std::size_t>(std::lround(static_cast<double>(nomads) * (1.0 - params_.female_fraction)));
  for (std::size_t k = 0; k < nomads; ++k) {
    lions[k].pride = -1;
    lions[k].sex = k < nomad_females ? Sex::Female : Sex::Male;
  }
  std::vector<std::size_t> pride_size(prides, 0);
  for (std::size_t k = 0; k < residents; ++k) ++pride_size[k % prides];
  std::vector<std::size_t> dealt(prides, 0);
  for (std::size_t k = 0; k < residents; ++k) {
    const std::size_t p = k % prides;
    const auto females = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(pride_size[p]) * params_.female_fraction)));
    Lion& l = lions[nomads + k];
    l.pride = static_cast<int>(p);
    l.sex = dealt[p] < females ? Sex::Female : Sex::Male;
    ++dealt[p];
  }
  return lions;
}

void LionOptimizer::evaluate(Lion& lion, CoverageProblem& problem) const {
  lion.fitness = problem.evaluate(binarize(lion.coords, params_.binarize_threshold));
}

Population LionOptimizer::to_population(std::size_t generation) const {
  Population pop;
  pop.generation = generation;
  pop.members.reserve(lions_.size());
  for (const Lion& l : lions_) {
    pop.members.push_back({binarize(l.coords, params_.binarize_threshold), l.coords, l.fitness});
  }
  return pop;
}

Population LionOptimizer::initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) {
  lions_ = assign_roles(size);
  for (Lion& l : lions_) {
    l.coords.resize(problem.dimension());
    for (double& c : l.coords) c = rng.uniform01();
    evaluate(l, problem);
  }
  return to_population(0);
}

Population LionOptimizer::step(const Population& pop, CoverageProblem& problem, RngStream& rng) {
  pop.check(problem.dimension());
  if (pop.size() < 4) throw InvalidArgument("lion optimizer: population must be at least 4");

  // Adopt the caller's positions; rebuild roles only when the shape changed.
  if (lions_.size() != pop.size()) lions_ = assign_roles(pop.size());
  for (std::size_t k = 0; k < pop.size(); ++k) {
    const auto& m = pop.members[k];
    Lion& l = lions_[k];
    if (m.position.empty()) {
      l.coords.assign(m.bits.size(), 0.0);
      for (std::size_t j = 0; j < m.bits.size(); ++j) l.coords[j] = m.bits[j] ? 1.0 : 0.0;
    } else {
      l.coords = m.position;
    }
    evaluate(l, problem);
  }

  const std::size_t best_k = static_cast<std::size_t>(
      std::max_element(lions_.begin(), lions_.end(),
                       [](const Lion& a, const Lion& b) { return a.objective() < b.objective(); }) -
      lions_.begin());
  const Lion incumbent = lions_[best_k];

  const int prides = std::accumulate(lions_.begin(), lions_.end(), -1,
                                     [](int acc, const Lion& l) { return std::max(acc, l.pride); }) + 1;
  for (int p = 0; p < prides; ++p) {
    std::vector<std::size_t> idx;
    std::vector<Lion> hunters;
    for (std::size_t k = 0; k < lions_.size(); ++k) {
      if (lions_[k].pride == p && lions_[k].sex == Sex::Female) {
        idx.push_back(k);
        hunters.push_back(lions_[k]);
      }
    }
    if (hunters.empty()) continue;
    std::vector<double> prey = hunting_prey(hunters);
    hunt(hunters, prey, problem, params_.binarize_threshold, rng);
    for (std::size_t h = 0; h < idx.size(); ++h) lions_[idx[h]] = std::move(hunters[h]);
  }

  LionParams cycle = params_;
  cycle.population = lions_.size();
  mate_sort_eliminate(lions_, cycle, problem, rng);

  auto worst = std::min_element(lions_.begin(), lions_.end(),
                                [](const Lion& a, const Lion& b) { return a.objective() < b.objective(); });
  const bool lost = std::none_of(lions_.begin(), lions_.end(),
                                 [&](const Lion& l) { return l.objective() >= incumbent.objective(); });
  if (lost) {
    worst->coords = incumbent.coords;
    worst->fitness = incumbent.fitness;
  }
  return to_population(pop.generation);
}

}  // namespace coverset
