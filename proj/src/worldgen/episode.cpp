#include "winnav/worldgen/episode.hpp"

#include "winnav/core/graph_ops.hpp"
#include "winnav/util/rng.hpp"

namespace winnav {

namespace {

int edge_sector(const NavGraph& graph, int from, int to) {
  Vec2 d = graph.nodes[static_cast<std::size_t>(to)].position -
           graph.nodes[static_cast<std::size_t>(from)].position;
  return direction_to_sector(d.x, d.y);
}

int turn_token(int sector_diff) {
  int d = sector_diff & 7;
  if (d == 0) return tok::kGoStraight;
  if (d >= 1 && d <= 3) return tok::kTurnRight;
  return tok::kTurnLeft;  // 4 (about-face) rendered as turn_left
}

}  // namespace

std::vector<int> render_instruction(const std::vector<int>& path, const HouseLayout& house,
                                    const NavGraph& graph, std::uint64_t /*seed*/) {
  if (path.size() < 2) throw UsageError("instruction needs a path of at least 2 viewpoints");
  auto type_of = [&](int node) {
    return house.rooms[static_cast<std::size_t>(graph.nodes[static_cast<std::size_t>(node)].room_id)].type;
  };
  std::vector<int> out;
  out.push_back(tok::kExit);
  out.push_back(room_token(type_of(path[0])));
  int prev_dir = edge_sector(graph, path[0], path[1]);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    int dir = edge_sector(graph, path[i], path[i + 1]);
    out.push_back(turn_token(dir - prev_dir));
    prev_dir = dir;
    bool last = (i + 2 == path.size());
    out.push_back(last ? tok::kEnter : tok::kPass);
    out.push_back(room_token(type_of(path[i + 1])));
  }
  out.push_back(tok::kStopAt);
  out.push_back(room_token(type_of(path.back())));
  return out;
}

Episode generate_episode(const HouseLayout& house, const NavGraph& graph, int house_id,
                         std::uint64_t seed, int min_hops, int max_hops) {
  int n = static_cast<int>(graph.num_nodes());
  std::vector<std::pair<int, int>> qualifying;
  std::vector<std::vector<int>> paths(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    ShortestPaths sp = shortest_paths_from(graph, a);
    for (int b = 0; b < n; ++b) {
      if (a == b || sp.dist[static_cast<std::size_t>(b)] == kInf) continue;
      std::vector<int> path;
      for (int v = b; v != -1; v = sp.prev[static_cast<std::size_t>(v)]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      int hops = static_cast<int>(path.size()) - 1;
      if (hops >= min_hops && hops <= max_hops) {
        qualifying.push_back({a, b});
        paths[static_cast<std::size_t>(a) * n + b] = std::move(path);
      }
    }
  }
  if (qualifying.empty())
    throw DataError("no viewpoint pair with shortest path in [" + std::to_string(min_hops) + ", " +
                    std::to_string(max_hops) + "] hops");
  Rng rng = Rng::stream(seed, 0x6570ull /* "ep" */, static_cast<std::uint64_t>(house_id));
  auto [a, b] = qualifying[rng.uniform_int(qualifying.size())];
  Episode ep;
  ep.house_id = house_id;
  ep.start = a;
  ep.goal = b;
  ep.path = paths[static_cast<std::size_t>(a) * n + b];
  ep.tokens = render_instruction(ep.path, house, graph, seed);
  return ep;
}

}  // namespace winnav
