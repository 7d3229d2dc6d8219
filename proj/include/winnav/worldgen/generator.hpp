#pragma once

#include <cstdint>

#include "winnav/core/types.hpp"
#include "winnav/worldgen/prior.hpp"

namespace winnav {

struct GeneratedHouse {
  HouseLayout house;
  NavGraph graph;
};

// Generates a connected house whose room types follow the prior's pairwise
// propensities. A pure function of (prior, seed). Throws DataError naming
// the violated constraint when the prior is degenerate.
GeneratedHouse generate_house(const LayoutPrior& prior, std::uint64_t seed);

}  // namespace winnav
