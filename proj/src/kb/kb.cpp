#include "winnav/kb/kb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "winnav/core/geometry.hpp"
#include "winnav/core/graph_ops.hpp"
#include "winnav/core/serialize.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav {

RoomType AdjacencyMatrix::majority_neighbor_type() const {
  int best = 0;
  std::int64_t best_count = -1;
  for (int t = 0; t < kNumGeneratedTypes; ++t) {
    std::int64_t total = 0;
    for (int u = 0; u < kNumRoomCategories; ++u)
      total += connectivity[static_cast<std::size_t>(u) * kNumRoomCategories + t];
    if (total > best_count) {
      best_count = total;
      best = t;
    }
  }
  return static_cast<RoomType>(best);
}

void AdjacencyMatrix::merge(const AdjacencyMatrix& other) {
  for (std::size_t i = 0; i < connectivity.size(); ++i) {
    connectivity[i] += other.connectivity[i];
    navigability[i] += other.navigability[i];
    visibility[i] += other.visibility[i];
  }
  // size/distance means are weighted by their supports
  for (int t = 0; t < kNumRoomCategories; ++t) {
    std::int64_t n0 = room_counts[static_cast<std::size_t>(t)];
    std::int64_t n1 = other.room_counts[static_cast<std::size_t>(t)];
    if (n0 + n1 > 0)
      mean_room_size[static_cast<std::size_t>(t)] =
          (mean_room_size[static_cast<std::size_t>(t)] * static_cast<double>(n0) +
           other.mean_room_size[static_cast<std::size_t>(t)] * static_cast<double>(n1)) /
          static_cast<double>(n0 + n1);
    room_counts[static_cast<std::size_t>(t)] = n0 + n1;
  }
  std::int64_t p0 = 0, p1 = 0;
  for (std::size_t i = 0; i < connectivity.size(); ++i) p0 += connectivity[i] - other.connectivity[i];
  for (std::size_t i = 0; i < connectivity.size(); ++i) p1 += other.connectivity[i];
  if (p0 + p1 > 0)
    mean_room_distance = (mean_room_distance * static_cast<double>(p0) +
                          other.mean_room_distance * static_cast<double>(p1)) /
                         static_cast<double>(p0 + p1);
  houses_counted += other.houses_counted;
}

namespace {

void write_matrix(std::ostringstream& os, const char* name,
                  const std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories>& m) {
  os << name << "\n";
  for (int a = 0; a < kNumRoomCategories; ++a) {
    for (int b = 0; b < kNumRoomCategories; ++b) {
      if (b) os << " ";
      os << m[static_cast<std::size_t>(a) * kNumRoomCategories + b];
    }
    os << "\n";
  }
}

void read_matrix(LineReader& in, const char* name,
                 std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories>& m) {
  if (in.expect_line() != name) throw DataError(std::string("kb: expected matrix ") + name);
  for (int a = 0; a < kNumRoomCategories; ++a) {
    auto row = split_ws(in.expect_line());
    if (row.size() != kNumRoomCategories) throw DataError("kb: bad matrix row");
    for (int b = 0; b < kNumRoomCategories; ++b)
      m[static_cast<std::size_t>(a) * kNumRoomCategories + b] = parse_int(row[static_cast<std::size_t>(b)]);
  }
}

}  // namespace

std::string AdjacencyMatrix::serialize() const {
  std::ostringstream os;
  os << "kb v1\n";
  os << "houses " << houses_counted << "\n";
  write_matrix(os, "connectivity", connectivity);
  write_matrix(os, "navigability", navigability);
  write_matrix(os, "visibility", visibility);
  os << "mean_room_size";
  for (double v : mean_room_size) os << " " << fmt_double(v);
  os << "\nroom_counts";
  for (std::int64_t v : room_counts) os << " " << v;
  os << "\nmean_room_distance " << fmt_double(mean_room_distance) << "\n";
  return os.str();
}

AdjacencyMatrix AdjacencyMatrix::parse(const std::string& text) {
  LineReader in(text);
  if (in.expect_line() != "kb v1") throw DataError("bad kb header (expected 'kb v1')");
  AdjacencyMatrix kb;
  kb.houses_counted = parse_int(in.expect_fields("houses", 1)[0]);
  read_matrix(in, "connectivity", kb.connectivity);
  read_matrix(in, "navigability", kb.navigability);
  read_matrix(in, "visibility", kb.visibility);
  auto sizes = in.expect_fields("mean_room_size", kNumRoomCategories);
  for (int t = 0; t < kNumRoomCategories; ++t) kb.mean_room_size[static_cast<std::size_t>(t)] = parse_double(sizes[static_cast<std::size_t>(t)]);
  auto counts = in.expect_fields("room_counts", kNumRoomCategories);
  for (int t = 0; t < kNumRoomCategories; ++t) kb.room_counts[static_cast<std::size_t>(t)] = parse_int(counts[static_cast<std::size_t>(t)]);
  kb.mean_room_distance = parse_double(in.expect_fields("mean_room_distance", 1)[0]);
  return kb;
}

std::string AdjacencyMatrix::heatmap_csv() const {
  std::ostringstream os;
  os << "matrix,row_type,col_type,count\n";
  const struct {
    const char* name;
    const std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories>& m;
  } blocks[] = {{"connectivity", connectivity}, {"navigability", navigability}, {"visibility", visibility}};
  for (const auto& blk : blocks)
    for (int a = 0; a < kNumRoomCategories; ++a)
      for (int b = 0; b < kNumRoomCategories; ++b)
        os << blk.name << "," << room_type_name(static_cast<RoomType>(a)) << ","
           << room_type_name(static_cast<RoomType>(b)) << ","
           << blk.m[static_cast<std::size_t>(a) * kNumRoomCategories + b] << "\n";
  return os.str();
}

Descriptor Descriptor::from_observation(const PanoramicObservation& obs) {
  // Per sector: a (sector, type) bin at weight 0.7/8 and a (sector,
  // depth-bucket) bin at weight 0.3/8; total mass 1.
  constexpr int kDepthBuckets = 6;
  Descriptor d;
  d.bins.assign(static_cast<std::size_t>(kNumHeadings) * (kNumRoomCategories + kDepthBuckets), 0.0);
  for (int k = 0; k < kNumHeadings; ++k) {
    const SectorView& sv = obs.sectors[static_cast<std::size_t>(k)];
    std::size_t base = static_cast<std::size_t>(k) * (kNumRoomCategories + kDepthBuckets);
    d.bins[base + static_cast<std::size_t>(sv.type)] += 0.7 / 8.0;
    int bucket = std::min(kDepthBuckets - 1, static_cast<int>(std::floor(sv.depth / 2.0)));
    d.bins[base + static_cast<std::size_t>(kNumRoomCategories + bucket)] += 0.3 / 8.0;
  }
  return d;
}

double descriptor_match(const Descriptor& a, const Descriptor& b) {
  if (a.bins.size() != b.bins.size()) throw UsageError("descriptor size mismatch");
  double score = 0.0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) score += std::min(a.bins[i], b.bins[i]);
  return score;
}

std::vector<Pose> sample_viewpoints(const HouseLayout& house, double min_separation) {
  int stride = std::max(1, static_cast<int>(std::ceil(min_separation / house.cell_size)));
  std::vector<Cell> candidates;
  // room centroids first so every room keeps one after filtering
  for (const Room& r : house.rooms)
    candidates.push_back({(r.lo.x + r.hi.x) / 2, (r.lo.y + r.hi.y) / 2});
  for (std::size_t i = 0; i < house.rooms.size(); ++i) {
    const Room& r = house.rooms[i];
    for (int y = r.lo.y; y <= r.hi.y; y += stride)
      for (int x = r.lo.x; x <= r.hi.x; x += stride) {
        Cell c{x, y};
        if (c == candidates[i]) continue;
        candidates.push_back(c);
      }
  }
  std::vector<Pose> kept;
  for (Cell c : candidates) {
    if (house.at(c) < 0) continue;
    Vec2 p = house.cell_center(c);
    bool ok = true;
    for (const Pose& q : kept)
      if ((p - q.position).norm() < min_separation) {
        ok = false;
        break;
      }
    if (ok) kept.push_back({p, 0});
  }
  return kept;
}

PairRelation classify_pair(const HouseLayout& house, const Pose& p1, const Pose& p2,
                           const KbParams& params) {
  Descriptor d1 = Descriptor::from_observation(observe(house, {p1.position, 0}));
  Descriptor d2 = Descriptor::from_observation(observe(house, {p2.position, 0}));
  double match = descriptor_match(d1, d2);
  double dist = (p1.position - p2.position).norm();
  if (match >= params.match_threshold)
    return dist < params.min_separation ? PairRelation::kSameRoom : PairRelation::kNavigable;
  if (dist <= params.locality_radius) return PairRelation::kNeighboringOccluded;
  return PairRelation::kUnrelated;
}

namespace {

bool rooms_share_wall(const HouseLayout& house, int a, int b) {
  for (int y = 0; y < house.height; ++y)
    for (int x = 0; x < house.width; ++x) {
      if (house.at({x, y}) != a) continue;
      for (Cell nb : {Cell{x + 1, y}, Cell{x - 1, y}, Cell{x, y + 1}, Cell{x, y - 1}})
        if (house.at(nb) == b) return true;
    }
  return false;
}

bool rooms_have_door(const HouseLayout& house, int a, int b) {
  for (const Door& d : house.doors) {
    int ra = house.at(d.a), rb = house.at(d.b);
    if ((ra == a && rb == b) || (ra == b && rb == a)) return true;
  }
  return false;
}

}  // namespace

AdjacencyMatrix build_adjacency(const std::vector<const GeneratedHouse*>& houses) {
  if (houses.empty()) throw DataError("build_adjacency: empty house list");
  AdjacencyMatrix kb;
  double dist_sum = 0.0;
  std::int64_t dist_count = 0;
  std::array<double, kNumRoomCategories> size_sum{};
  for (const GeneratedHouse* gh : houses) {
    const HouseLayout& h = gh->house;
    int n = static_cast<int>(h.rooms.size());
    for (int i = 0; i < n; ++i) {
      RoomType t = h.rooms[static_cast<std::size_t>(i)].type;
      kb.room_counts[static_cast<std::size_t>(t)]++;
      size_sum[static_cast<std::size_t>(t)] += h.rooms[static_cast<std::size_t>(i)].width() *
                                               h.rooms[static_cast<std::size_t>(i)].height() *
                                               h.cell_size * h.cell_size;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        RoomType ta = h.rooms[static_cast<std::size_t>(a)].type;
        RoomType tb = h.rooms[static_cast<std::size_t>(b)].type;
        std::size_t ab = static_cast<std::size_t>(ta) * kNumRoomCategories + static_cast<std::size_t>(tb);
        std::size_t ba = static_cast<std::size_t>(tb) * kNumRoomCategories + static_cast<std::size_t>(ta);
        if (rooms_share_wall(h, a, b)) {
          kb.connectivity[ab]++;
          if (ab != ba) kb.connectivity[ba]++;
          dist_sum += (h.rooms[static_cast<std::size_t>(a)].centroid -
                       h.rooms[static_cast<std::size_t>(b)].centroid).norm();
          ++dist_count;
        }
        if (rooms_have_door(h, a, b)) {
          kb.navigability[ab]++;
          if (ab != ba) kb.navigability[ba]++;
        }
        if (line_of_sight(h, h.rooms[static_cast<std::size_t>(a)].centroid,
                          h.rooms[static_cast<std::size_t>(b)].centroid)) {
          kb.visibility[ab]++;
          if (ab != ba) kb.visibility[ba]++;
        }
      }
    kb.houses_counted++;
  }
  for (int t = 0; t < kNumRoomCategories; ++t)
    if (kb.room_counts[static_cast<std::size_t>(t)] > 0)
      kb.mean_room_size[static_cast<std::size_t>(t)] =
          size_sum[static_cast<std::size_t>(t)] / static_cast<double>(kb.room_counts[static_cast<std::size_t>(t)]);
  if (dist_count > 0) kb.mean_room_distance = dist_sum / static_cast<double>(dist_count);
  return kb;
}

LocalityMap ground_truth_locality_map(const HouseLayout& house, const Pose& pose, int g, double s) {
  if (g < 1 || g % 2 == 0) throw UsageError("locality map size must be odd");
  LocalityMap map(g, s);
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      Vec2 p = local_cell_world_point(pose, r, c, g, s);
      Cell cell{nearest_cell_index(p.x, house.cell_size), nearest_cell_index(p.y, house.cell_size)};
      std::int16_t v = house.at(cell);
      if (v >= 0) {
        map.set_one_hot(r, c, house.type_of_room(v));
      } else if (v == HouseLayout::kWallCell) {
        // nearest room by Euclidean distance to the room rectangle, ties
        // toward the lower room id (strict < keeps the first best)
        Vec2 pc = house.cell_center(cell);
        double best = kInf;
        RoomType best_type = RoomType::kOutside;
        for (const Room& room : house.rooms) {
          double dx = std::max({room.lo.x * house.cell_size - pc.x,
                                pc.x - (room.hi.x + 1) * house.cell_size, 0.0});
          double dy = std::max({room.lo.y * house.cell_size - pc.y,
                                pc.y - (room.hi.y + 1) * house.cell_size, 0.0});
          double d = std::sqrt(dx * dx + dy * dy);
          if (d < best) {
            best = d;
            best_type = room.type;
          }
        }
        map.set_one_hot(r, c, best_type);
      } else {
        map.set_one_hot(r, c, RoomType::kOutside);
      }
    }
  }
  return map;
}

}  // namespace winnav
