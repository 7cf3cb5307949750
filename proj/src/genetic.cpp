#include "coverset/genetic.hpp"

#include <algorithm>
#include <numeric>

#include "coverset/errors.hpp"

namespace coverset {
namespace {

void check_population_stats(double f_max, double f_avg) {
  if (f_max < f_avg) throw InvalidArgument("adaptive probability: f_max must not be below f_avg");
}

}  // namespace

void AdaptiveGaParams::validate() const {
  for (double k : {k1, k2, k3, k4}) {
    if (!(k > 0.0 && k <= 1.0)) throw InvalidArgument("adaptive GA: constants k1..k4 must lie in (0, 1]");
  }
  if (k1 < k2 || k3 < k4) throw InvalidArgument("adaptive GA: require k1 >= k2 and k3 >= k4");
  if (!(0.0 <= pc_min && pc_min <= pc_max && pc_max <= 1.0)) throw InvalidArgument("adaptive GA: bad Pc range");
  if (!(0.0 <= pm_min && pm_min <= pm_max && pm_max <= 1.0)) throw InvalidArgument("adaptive GA: bad Pm range");
}

double raw_crossover_prob(double f_prime, double f_max, double f_avg, const AdaptiveGaParams& p) {
  check_population_stats(f_max, f_avg);
  if (f_max == f_avg || f_prime <= f_avg) return p.k3;
  return p.k1 * (f_max - f_prime) / (f_max - f_avg);
}

double raw_mutation_prob(double f, double f_max, double f_avg, const AdaptiveGaParams& p) {
  check_population_stats(f_max, f_avg);
  if (f_max == f_avg || f <= f_avg) return p.k4;
  return p.k2 * (f_max - f) / (f_max - f_avg);
}

double adaptive_crossover_prob(double f_prime, double f_max, double f_avg, const AdaptiveGaParams& p) {
  return std::clamp(raw_crossover_prob(f_prime, f_max, f_avg, p), p.pc_min, p.pc_max);
}

double adaptive_mutation_prob(double f, double f_max, double f_avg, const AdaptiveGaParams& p) {
  return std::clamp(raw_mutation_prob(f, f_max, f_avg, p), p.pm_min, p.pm_max);
}

std::vector<double> roulette_probabilities(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("roulette: no weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> probs(weights.size());
  if (!(total > 0.0)) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(weights.size()));
    return probs;
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InvalidArgument("roulette: negative weight");
    probs[i] = weights[i] / total;
  }
  return probs;
}

std::size_t roulette_pick(std::span<const double> weights, RngStream& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty()) throw InvalidArgument("roulette: no weights");
  if (!(total > 0.0)) return rng.index(weights.size());
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

Population select_reproduce(const Population& pop, RngStream& rng) {
  if (pop.members.empty()) throw InvalidArgument("select_reproduce: empty population");
  std::vector<double> weights;
  weights.reserve(pop.size());
  for (const auto& m : pop.members) weights.push_back(m.objective());

  Population out;
  out.generation = pop.generation;
  out.members.reserve(pop.size());
  out.members.push_back(pop.best());
  while (out.members.size() < pop.size()) out.members.push_back(pop.members[roulette_pick(weights, rng)]);
  return out;
}

std::pair<ControlVector, ControlVector> crossover_at(const ControlVector& a, const ControlVector& b,
                                                     std::size_t cut) {
  if (a.size() != b.size()) throw DimensionError("crossover: parents differ in length");
  if (cut > a.size()) throw InvalidArgument("crossover: cut beyond genome length");
  auto ra = a.raw();
  auto rb = b.raw();
  std::swap_ranges(ra.begin() + static_cast<std::ptrdiff_t>(cut), ra.end(),
                   rb.begin() + static_cast<std::ptrdiff_t>(cut));
  return {ControlVector(std::move(ra)), ControlVector(std::move(rb))};
}

std::pair<ControlVector, ControlVector> crossover(const ControlVector& a, const ControlVector& b, double pc,
                                                  RngStream& rng) {
  if (a.size() != b.size()) throw DimensionError("crossover: parents differ in length");
  if (a.size() < 2 || !rng.bernoulli(pc)) return {a, b};
  const std::size_t cut = 1 + rng.index(a.size() - 1);
  return crossover_at(a, b, cut);
}

ControlVector mutate(const ControlVector& v, double pm, RngStream& rng) {
  if (!(pm >= 0.0 && pm <= 1.0)) throw InvalidArgument("mutate: pm must lie in [0, 1]");
  ControlVector out = v;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (rng.bernoulli(pm)) out.flip(j);
  }
  return out;
}

AdaptiveGa::AdaptiveGa(AdaptiveGaParams params) : params_(params) { params_.validate(); }

Population AdaptiveGa::initialize(std::size_t size, CoverageProblem& problem, RngStream& rng) {
  Population pop = random_binary_population(size, problem.dimension(), rng);
  problem.evaluate(pop);
  return pop;
}

Population AdaptiveGa::step(const Population& pop, CoverageProblem& problem, RngStream& rng) {
  pop.check(problem.dimension());
  Population current = pop;
  problem.evaluate(current);
  const CandidateSolution incumbent = current.best();

  double f_max = incumbent.objective();
  double f_sum = 0.0;
  for (const auto& m : current.members) f_sum += m.objective();
  const double f_avg = std::min(f_max, f_sum / static_cast<double>(current.size()));

  Population next = select_reproduce(current, rng);
  rng.shuffle(std::span(next.members));

  for (std::size_t k = 0; k + 1 < next.size(); k += 2) {
    auto& a = next.members[k];
    auto& b = next.members[k + 1];
    const double f_prime = std::max(a.objective(), b.objective());
    const double pc = adaptive_crossover_prob(f_prime, f_max, f_avg, params_);
    auto [ca, cb] = crossover(a.bits, b.bits, pc, rng);
    if (!(ca == a.bits)) a = {std::move(ca), {}, std::nullopt};
    if (!(cb == b.bits)) b = {std::move(cb), {}, std::nullopt};
  }
  problem.evaluate(next);

  for (auto& m : next.members) {
    const double pm = adaptive_mutation_prob(std::min(m.objective(), f_max), f_max, f_avg, params_);
    ControlVector mutated = mutate(m.bits, pm, rng);
    if (!(mutated == m.bits)) m = {std::move(mutated), {}, std::nullopt};
  }
  problem.evaluate(next);
  retain_elite(next, incumbent);
  next.generation = pop.generation;
  return next;
}

}  // namespace coverset
