#include "winnav/worldgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "winnav/core/graph_ops.hpp"
#include "winnav/util/rng.hpp"

namespace winnav {

namespace {

struct Slot {
  RoomType type;
  int x0, x1;  // cell span [x0, x1)
  int y0, y1;
  int row;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

// Boundary cell pairs (a in room i, b in room j) along the shared wall.
std::vector<Door> shared_boundary(const Slot& a, const Slot& b) {
  std::vector<Door> out;
  if (a.row == b.row) {
    const Slot& left = a.x0 <= b.x0 ? a : b;
    const Slot& right = a.x0 <= b.x0 ? b : a;
    if (left.x1 != right.x0) return out;
    int ylo = std::max(left.y0, right.y0);
    int yhi = std::min(left.y1, right.y1);
    for (int y = ylo; y < yhi; ++y)
      out.push_back({{left.x1 - 1, y}, {right.x0, y}});
  } else {
    const Slot& low = a.y0 <= b.y0 ? a : b;
    const Slot& high = a.y0 <= b.y0 ? b : a;
    if (low.y1 != high.y0) return out;
    int xlo = std::max(low.x0, high.x0);
    int xhi = std::min(low.x1, high.x1);
    for (int x = xlo; x < xhi; ++x)
      out.push_back({{x, low.y1 - 1}, {x, high.y0}});
  }
  return out;
}

int size_for_type(const LayoutPrior& prior, RoomType t, Rng& rng) {
  int base = prior.type_size[static_cast<std::size_t>(t)];
  if (base <= 0) base = (prior.room_size_min + prior.room_size_max) / 2;
  int jitter = static_cast<int>(rng.uniform_int(3)) - 1;
  return std::clamp(base + jitter, prior.room_size_min, prior.room_size_max);
}

struct GenFailure {
  const char* constraint;
};

GeneratedHouse try_generate(const LayoutPrior& prior, Rng& rng) {
  int n_target = static_cast<int>(rng.uniform_range(prior.room_count_min, prior.room_count_max));
  int n_rows = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_target)))));
  std::vector<int> row_counts(static_cast<std::size_t>(n_rows), n_target / n_rows);
  for (int i = 0; i < n_target % n_rows; ++i) row_counts[static_cast<std::size_t>(i)]++;

  int mean_width = (prior.room_size_min + prior.room_size_max) / 2;
  std::vector<Slot> slots;
  int y_cursor = 1;  // 1-cell wall margin
  for (int row = 0; row < n_rows; ++row) {
    int row_height = static_cast<int>(rng.uniform_range(prior.room_size_min, prior.room_size_max));
    int x_cursor = 1;
    for (int j = 0; j < row_counts[static_cast<std::size_t>(row)]; ++j) {
      // Conditioning set: left neighbor plus previous-row rooms expected to
      // overlap this slot's span.
      std::vector<RoomType> known;
      if (j > 0) known.push_back(slots.back().type);
      for (const Slot& s : slots) {
        if (s.row != row - 1) continue;
        if (s.x1 > x_cursor && s.x0 < x_cursor + mean_width) known.push_back(s.type);
      }
      std::vector<double> w(kNumGeneratedTypes, 0.0);
      double total = 0.0;
      for (int t = 0; t < kNumGeneratedTypes; ++t) {
        double v;
        if (known.empty()) {
          v = 0.0;  // marginal: row sum over generated types
          for (int u = 0; u < kNumGeneratedTypes; ++u)
            v += prior.propensity(static_cast<RoomType>(t), static_cast<RoomType>(u));
        } else {
          v = 1.0;
          for (RoomType u : known) v *= prior.propensity(static_cast<RoomType>(t), u);
        }
        w[static_cast<std::size_t>(t)] = v;
        total += v;
      }
      if (total <= 0.0) throw GenFailure{"no room type compatible with assigned neighbors"};
      RoomType type = static_cast<RoomType>(rng.weighted_index(w));
      int width = size_for_type(prior, type, rng);
      slots.push_back({type, x_cursor, x_cursor + width, y_cursor, y_cursor + row_height, row});
      x_cursor += width;
    }
    y_cursor += row_height;
  }

  // Cell grid: union footprint plus a wall ring.
  int max_x = 0, max_y = 0;
  for (const Slot& s : slots) {
    max_x = std::max(max_x, s.x1);
    max_y = std::max(max_y, s.y1);
  }
  HouseLayout house;
  house.width = max_x + 1;
  house.height = max_y + 1;
  house.cell_size = kDefaultCellSize;
  house.cells.assign(static_cast<std::size_t>(house.width) * house.height, HouseLayout::kOutsideCell);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& s = slots[i];
    for (int y = s.y0; y < s.y1; ++y)
      for (int x = s.x0; x < s.x1; ++x) house.at_mut({x, y}) = static_cast<std::int16_t>(i);
  }
  for (int y = 0; y < house.height; ++y)
    for (int x = 0; x < house.width; ++x) {
      if (house.at({x, y}) != HouseLayout::kOutsideCell) continue;
      bool near_room = false;
      for (int dy = -1; dy <= 1 && !near_room; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (house.at({x + dx, y + dy}) >= 0) {
            near_room = true;
            break;
          }
      if (near_room) house.at_mut({x, y}) = HouseLayout::kWallCell;
    }

  for (const Slot& s : slots) {
    Room r;
    r.type = s.type;
    r.lo = {s.x0, s.y0};
    r.hi = {s.x1 - 1, s.y1 - 1};
    Cell center{(s.x0 + s.x1 - 1) / 2, (s.y0 + s.y1 - 1) / 2};
    r.centroid = house.cell_center(center);
    house.rooms.push_back(r);
  }

  // Doors: sample per adjacent pair, then complete connectivity along
  // deterministic lowest-id pairs.
  int n = static_cast<int>(slots.size());
  struct Pair {
    int a, b;
    std::vector<Door> boundary;
  };
  std::vector<Pair> adjacent;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      auto boundary = shared_boundary(slots[static_cast<std::size_t>(a)], slots[static_cast<std::size_t>(b)]);
      if (!boundary.empty()) adjacent.push_back({a, b, std::move(boundary)});
    }

  UnionFind uf(n);
  for (const Pair& p : adjacent) {
    double dp = prior.door_prob(slots[static_cast<std::size_t>(p.a)].type, slots[static_cast<std::size_t>(p.b)].type);
    if (rng.uniform() < dp) {
      house.doors.push_back(p.boundary[rng.uniform_int(p.boundary.size())]);
      uf.unite(p.a, p.b);
    }
  }
  bool progress = true;
  while (progress) {
    int components = 0;
    for (int i = 0; i < n; ++i)
      if (uf.find(i) == i) ++components;
    if (components == 1) break;
    progress = false;
    for (const Pair& p : adjacent) {
      if (uf.find(p.a) != uf.find(p.b)) {
        house.doors.push_back(p.boundary[rng.uniform_int(p.boundary.size())]);
        uf.unite(p.a, p.b);
        progress = true;
        break;
      }
    }
    if (!progress) throw GenFailure{"house cannot be made connected (disjoint room rows)"};
  }
  std::sort(house.doors.begin(), house.doors.end(), [](const Door& x, const Door& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  // One viewpoint per room at its centroid; edges where doors connect rooms,
  // with geodesic length through the connecting doorway.
  NavGraph graph;
  for (int i = 0; i < n; ++i) graph.nodes.push_back({i, house.rooms[static_cast<std::size_t>(i)].centroid});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double best = kInf;
      for (const Door& d : house.doors) {
        int ra = house.at(d.a), rb = house.at(d.b);
        if ((ra == a && rb == b) || (ra == b && rb == a)) {
          Vec2 mid = 0.5 * (house.cell_center(d.a) + house.cell_center(d.b));
          double len = (graph.nodes[static_cast<std::size_t>(a)].position - mid).norm() +
                       (mid - graph.nodes[static_cast<std::size_t>(b)].position).norm();
          best = std::min(best, len);
        }
      }
      if (best < kInf) graph.edges.push_back({a, b, best});
    }

  return {std::move(house), std::move(graph)};
}

}  // namespace

GeneratedHouse generate_house(const LayoutPrior& prior, std::uint64_t seed) {
  prior.validate();
  const int kRetries = 16;
  const char* last_constraint = "unknown";
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Rng rng = Rng::stream(seed, 0x686f757365ull /* "house" */, static_cast<std::uint64_t>(attempt));
    try {
      return try_generate(prior, rng);
    } catch (const GenFailure& f) {
      last_constraint = f.constraint;
    }
  }
  throw DataError(std::string("house generation failed after bounded retries: ") + last_constraint);
}

}  // namespace winnav
