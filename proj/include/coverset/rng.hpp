#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace coverset {

/// Source of uniform draws in [0, 1). Operators that only need uniform draws take
/// this interface so tests can pin the draws and check the arithmetic by hand.
class UniformSource {
 public:
  virtual ~UniformSource() = default;
  virtual double uniform01() = 0;

  /// Uniform in [lo, hi) (or [hi, lo) when reversed). Returns lo when lo == hi.
  double uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return lo + (hi - lo) * uniform01();
  }
};

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All conversions (to doubles, indices, Bernoulli draws) are done here
/// rather than through <random> distributions, whose algorithms are
/// implementation-defined. Together this makes every draw sequence identical across
/// compilers and platforms for a given seed:
///
///   uniform01()  = (next_u64() >> 11) * 2^-53
///   index(n)     = rejection sampling on next_u64() against the largest multiple of n
///   bernoulli(p) = uniform01() < p
///   derive(tag)  = RngStream(splitmix64(seed ^ fnv1a64(tag)))
class RngStream final : public UniformSource {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform01() override;
  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Independent stream for a named purpose (deployment, optimizer, ...).
  RngStream derive(std::string_view tag) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Always returns the same draw. Used to pin operator randomness in tests.
class FixedUniform final : public UniformSource {
 public:
  explicit FixedUniform(double value) : value_(value) {}
  double uniform01() override { return value_; }

 private:
  double value_;
};

}  // namespace coverset
