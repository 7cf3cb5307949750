#include <doctest.h>

#include "properties.hpp"

TEST_CASE("randomized invariants") {
  for (const auto& check : properties::kAll) {
    for (std::uint64_t seed : {11ULL, 12ULL}) {
      CAPTURE(check.name);
      CAPTURE(seed);
      CHECK(check.run(seed) == "");
    }
  }
}
