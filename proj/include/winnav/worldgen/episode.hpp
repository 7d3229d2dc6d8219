#pragma once

#include <cstdint>
#include <vector>

#include "winnav/core/types.hpp"
#include "winnav/worldgen/vocab.hpp"

namespace winnav {

struct Episode {
  int house_id = 0;
  int start = 0;
  int goal = 0;
  std::vector<int> path;    // shortest viewpoint sequence, start..goal
  std::vector<int> tokens;  // templated instruction over the fixed vocabulary

  // Heading the agent starts with: the sector of the first ground-truth hop
  // (instructions render the first move as go_straight).
  int start_heading(const NavGraph& graph) const {
    Vec2 d = graph.nodes[static_cast<std::size_t>(path[1])].position -
             graph.nodes[static_cast<std::size_t>(path[0])].position;
    return direction_to_sector(d.x, d.y);
  }
};

// Deterministic templated instruction for a path:
//   exit A, then per hop a relative-direction word and pass/enter X,
//   then stop_at goal. Length is at most 4 + 3 * hops.
// The seed is reserved for future paraphrase variation; rendering is
// deterministic regardless of its value.
std::vector<int> render_instruction(const std::vector<int>& path, const HouseLayout& house,
                                    const NavGraph& graph, std::uint64_t seed = 0);

// Samples an episode whose shortest path has between min_hops and max_hops
// edges. Errors when no qualifying pair exists.
Episode generate_episode(const HouseLayout& house, const NavGraph& graph, int house_id,
                         std::uint64_t seed, int min_hops, int max_hops);

}  // namespace winnav
