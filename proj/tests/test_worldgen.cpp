#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "winnav/core/graph_ops.hpp"
#include "winnav/core/serialize.hpp"
#include "winnav/worldgen/dataset.hpp"
#include "winnav/worldgen/episode.hpp"
#include "winnav/worldgen/generator.hpp"
#include "winnav/worldgen/observe.hpp"

using namespace winnav;

namespace {

LayoutPrior two_room_prior() {
  LayoutPrior p;
  p.room_count_min = p.room_count_max = 2;
  p.set_propensity(RoomType::kBathroom, RoomType::kBedroom, 1.0);
  p.set_door_prob_all(0.5);
  p.type_size = {4, 5, 5, 5, 5, 4, 4, 5, 4, 5, 4, 4};
  return p;
}

// Hand-built 2-room fixture: bedroom (rooms 0) and kitchen (room 1) side by
// side, 4x4 cells each, one door in the middle of the shared wall.
//
//   walls ring. bedroom cells x in [1,4], kitchen x in [5,8], y in [1,4].
//   door between (4,2) and (5,2).
GeneratedHouse two_room_fixture(bool with_door = true) {
  GeneratedHouse gh;
  HouseLayout& h = gh.house;
  h.width = 10;
  h.height = 6;
  h.cell_size = 0.5;
  h.cells.assign(static_cast<std::size_t>(h.width) * h.height, HouseLayout::kWallCell);
  for (int y = 1; y <= 4; ++y) {
    for (int x = 1; x <= 4; ++x) h.at_mut({x, y}) = 0;
    for (int x = 5; x <= 8; ++x) h.at_mut({x, y}) = 1;
  }
  Room bedroom;
  bedroom.type = RoomType::kBedroom;
  bedroom.lo = {1, 1};
  bedroom.hi = {4, 4};
  bedroom.centroid = h.cell_center({2, 2});
  Room kitchen;
  kitchen.type = RoomType::kKitchen;
  kitchen.lo = {5, 1};
  kitchen.hi = {8, 4};
  kitchen.centroid = h.cell_center({6, 2});
  h.rooms = {bedroom, kitchen};
  if (with_door) h.doors.push_back({{4, 2}, {5, 2}});
  gh.graph.nodes = {{0, bedroom.centroid}, {1, kitchen.centroid}};
  if (with_door) {
    Vec2 mid = 0.5 * (h.cell_center({4, 2}) + h.cell_center({5, 2}));
    double len = (bedroom.centroid - mid).norm() + (mid - kitchen.centroid).norm();
    gh.graph.edges = {{0, 1, len}};
  }
  return gh;
}

}  // namespace

TEST_CASE("forced 2-room prior always yields bathroom adjoining bedroom") {
  LayoutPrior prior = two_room_prior();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GeneratedHouse gh = generate_house(prior, seed);
    REQUIRE(gh.house.rooms.size() == 2);
    std::multiset<RoomType> types = {gh.house.rooms[0].type, gh.house.rooms[1].type};
    REQUIRE(types.count(RoomType::kBathroom) == 1);
    REQUIRE(types.count(RoomType::kBedroom) == 1);
    REQUIRE(!gh.house.doors.empty());
    REQUIRE(gh.graph.edges.size() == 1);
  }
}

TEST_CASE("same seed gives byte-identical serialized houses") {
  LayoutPrior prior = LayoutPrior::household();
  for (std::uint64_t seed : {3ull, 11ull, 42ull}) {
    GeneratedHouse a = generate_house(prior, seed);
    GeneratedHouse b = generate_house(prior, seed);
    REQUIRE(serialize_house(a.house, a.graph) == serialize_house(b.house, b.graph));
  }
}

TEST_CASE("generated houses satisfy structural invariants") {
  LayoutPrior prior = LayoutPrior::household();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    GeneratedHouse gh = generate_house(prior, seed);
    const HouseLayout& h = gh.house;
    REQUIRE(static_cast<int>(h.rooms.size()) >= prior.room_count_min);
    REQUIRE(static_cast<int>(h.rooms.size()) <= prior.room_count_max);
    // sentinels never appear as generated room types
    for (const Room& r : h.rooms)
      REQUIRE(static_cast<int>(r.type) < kNumGeneratedTypes);
    // doors straddle two distinct rooms
    for (const Door& d : h.doors) {
      REQUIRE(h.at(d.a) >= 0);
      REQUIRE(h.at(d.b) >= 0);
      REQUIRE(h.at(d.a) != h.at(d.b));
      REQUIRE(std::abs(d.a.x - d.b.x) + std::abs(d.a.y - d.b.y) == 1);
    }
    // graph connected, one node per room, edges exactly where doors are
    REQUIRE(gh.graph.nodes.size() == h.rooms.size());
    auto hops = hop_counts_from(gh.graph, 0);
    for (int v : hops) REQUIRE(v >= 0);
    for (const auto& e : gh.graph.edges) {
      bool found = false;
      for (const Door& d : h.doors) {
        int ra = h.at(d.a), rb = h.at(d.b);
        if ((ra == e.a && rb == e.b) || (ra == e.b && rb == e.a)) found = true;
      }
      REQUIRE(found);
      REQUIRE(e.length > 0.0);
    }
    // viewpoint positions are inside their rooms
    for (std::size_t i = 0; i < gh.graph.nodes.size(); ++i) {
      Cell c = h.cell_of(gh.graph.nodes[i].position);
      REQUIRE(h.at(c) == static_cast<int>(i));
    }
  }
}

TEST_CASE("neighbor-type frequencies track a 3:1 propensity ratio") {
  LayoutPrior prior;
  for (int a = 0; a < kNumGeneratedTypes; ++a)
    for (int b = 0; b < kNumGeneratedTypes; ++b)
      prior.adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + b] = 1.0;
  prior.set_propensity(RoomType::kBathroom, RoomType::kBedroom, 3.0);
  prior.set_door_prob_all(0.6);
  prior.type_size = {5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5};

  double bath_bed = 0, bath_kitchen = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    GeneratedHouse gh = generate_house(prior, 100000 + seed);
    const HouseLayout& h = gh.house;
    // count adjacencies (shared wall) via boundary scan
    std::set<std::pair<int, int>> pairs;
    for (int y = 0; y < h.height; ++y)
      for (int x = 0; x < h.width; ++x) {
        int a = h.at({x, y});
        if (a < 0) continue;
        for (Cell nb : {Cell{x + 1, y}, Cell{x, y + 1}}) {
          int b = h.at(nb);
          if (b < 0 || b == a) continue;
          pairs.insert({std::min(a, b), std::max(a, b)});
        }
      }
    for (auto [a, b] : pairs) {
      RoomType ta = h.rooms[static_cast<std::size_t>(a)].type;
      RoomType tb = h.rooms[static_cast<std::size_t>(b)].type;
      auto is = [&](RoomType x, RoomType y) {
        return (ta == x && tb == y) || (ta == y && tb == x);
      };
      if (is(RoomType::kBathroom, RoomType::kBedroom)) bath_bed += 1;
      if (is(RoomType::kBathroom, RoomType::kKitchen)) bath_kitchen += 1;
    }
  }
  REQUIRE(bath_kitchen > 0);
  double ratio = bath_bed / bath_kitchen;
  REQUIRE(ratio > 3.0 * 0.75);
  REQUIRE(ratio < 3.0 * 1.25);
}

TEST_CASE("observe: closed one-room house reports own type and wall depths") {
  LayoutPrior prior;
  prior.room_count_min = prior.room_count_max = 1;
  prior.set_propensity(RoomType::kOffice, RoomType::kOffice, 1.0);
  prior.set_door_prob_all(1.0);
  prior.type_size = {4, 4, 4, 4, 4, 4, 4, 5, 4, 4, 4, 4};
  GeneratedHouse gh = generate_house(prior, 7);
  REQUIRE(gh.house.rooms.size() == 1);

  Pose pose{gh.graph.nodes[0].position, 0};
  PanoramicObservation obs = observe(gh.house, pose);
  const Room& room = gh.house.rooms[0];
  for (int k = 0; k < kNumHeadings; ++k) {
    const SectorView& sv = obs.sectors[static_cast<std::size_t>(k)];
    REQUIRE(sv.type == room.type);
    REQUIRE(!sv.door);
    REQUIRE(sv.depth > 0.0);
  }
  // axis depths equal the exact distance to the room boundary
  Vec2 p = pose.position;
  double s = gh.house.cell_size;
  double north = (room.hi.y + 1) * s - p.y;
  double east = (room.hi.x + 1) * s - p.x;
  double south = p.y - room.lo.y * s;
  double west = p.x - room.lo.x * s;
  REQUIRE(obs.sectors[0].depth == doctest::Approx(north).epsilon(1e-12));
  REQUIRE(obs.sectors[2].depth == doctest::Approx(east).epsilon(1e-12));
  REQUIRE(obs.sectors[4].depth == doctest::Approx(south).epsilon(1e-12));
  REQUIRE(obs.sectors[6].depth == doctest::Approx(west).epsilon(1e-12));
}

TEST_CASE("observe: sector facing an open door reports the room beyond") {
  GeneratedHouse gh = two_room_fixture();
  // stand in the bedroom on the door row, looking east through the door
  Pose pose{gh.house.cell_center({2, 2}), 2};
  PanoramicObservation obs = observe(gh.house, pose);
  // sector 0 is ahead (east): ray passes (4,2)-(5,2) door into the kitchen
  REQUIRE(obs.sectors[0].type == RoomType::kKitchen);
  REQUIRE(obs.sectors[0].door);
  // depth runs to the kitchen's far wall: from x=1.25 to x=4.5
  REQUIRE(obs.sectors[0].depth == doctest::Approx(4.5 - 1.25).epsilon(1e-12));
  // behind (west) is the bedroom wall
  REQUIRE(obs.sectors[4].type == RoomType::kBedroom);
  REQUIRE(obs.sectors[4].depth == doctest::Approx(1.25 - 0.5).epsilon(1e-12));
}

TEST_CASE("observe: no door means no see-through") {
  GeneratedHouse gh = two_room_fixture(/*with_door=*/false);
  Pose pose{gh.house.cell_center({2, 2}), 2};
  PanoramicObservation obs = observe(gh.house, pose);
  for (int k = 0; k < kNumHeadings; ++k)
    REQUIRE(obs.sectors[static_cast<std::size_t>(k)].type == RoomType::kBedroom);
}

TEST_CASE("observe: orientation encoding for sector 0 is [1,0,1,0]") {
  GeneratedHouse gh = two_room_fixture();
  Pose pose{gh.house.cell_center({2, 2}), 3};
  PanoramicObservation obs = observe(gh.house, pose);
  REQUIRE(obs.sectors[0].orientation == std::array<double, 4>{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("ray casting never sees through walls (brute-force cell walk)") {
  LayoutPrior prior = LayoutPrior::household();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratedHouse gh = generate_house(prior, 900 + seed);
    for (const auto& node : gh.graph.nodes) {
      for (int heading = 0; heading < 8; ++heading) {
        Pose pose{node.position, heading};
        PanoramicObservation obs = observe(gh.house, pose);
        for (int k = 0; k < 8; ++k) {
          if (((heading + k) & 1) != 0) continue;  // axis rays admit an exact walk
          const SectorView& sv = obs.sectors[static_cast<std::size_t>(k)];
          Vec2 dir = heading_dir((heading + k) & 7);
          // walk cells one at a time and stop at the first impassable boundary
          Cell cur = gh.house.cell_of(pose.position);
          RoomType expect = gh.house.type_of_room(gh.house.at(cur));
          bool crossed_door = false;
          for (int step = 0; step < 100; ++step) {
            Cell next{cur.x + static_cast<int>(dir.x), cur.y + static_cast<int>(dir.y)};
            if (!gh.house.boundary_passable(cur, next)) break;
            if (gh.house.at(next) != gh.house.at(cur)) crossed_door = true;
            if (crossed_door && gh.house.at(next) != gh.house.at(gh.house.cell_of(pose.position))) {
              expect = gh.house.type_of_room(gh.house.at(next));
              break;
            }
            cur = next;
          }
          REQUIRE(sv.type == expect);
        }
      }
    }
  }
}

TEST_CASE("render_instruction: single hop straight move") {
  GeneratedHouse gh = two_room_fixture();
  std::vector<int> tokens = render_instruction({0, 1}, gh.house, gh.graph);
  std::vector<int> expect = {tok::kExit,  room_token(RoomType::kBedroom), tok::kGoStraight,
                             tok::kEnter, room_token(RoomType::kKitchen), tok::kStopAt,
                             room_token(RoomType::kKitchen)};
  REQUIRE(tokens == expect);
}

TEST_CASE("render_instruction: left turn geometry emits turn_left") {
  // three rooms in an L: 0 -> 1 east, then 1 -> 2 north (east then north = left turn)
  GeneratedHouse gh;
  gh.graph.nodes = {{0, {1.0, 1.0}}, {1, {3.0, 1.0}}, {2, {3.0, 3.0}}};
  gh.graph.edges = {{0, 1, 2.0}, {1, 2, 2.0}};
  HouseLayout& h = gh.house;
  h.width = h.height = 16;
  h.cells.assign(256, HouseLayout::kWallCell);
  Room a, b, c;
  a.type = RoomType::kBedroom;
  b.type = RoomType::kHallway;
  c.type = RoomType::kKitchen;
  h.rooms = {a, b, c};
  std::vector<int> tokens = render_instruction({0, 1, 2}, h, gh.graph);
  bool has_left = false;
  for (int t : tokens) has_left = has_left || t == tok::kTurnLeft;
  REQUIRE(has_left);
  // ordered subsequence: exit bedroom ... pass hallway ... enter kitchen ... stop_at kitchen
  std::vector<int> expect_order = {tok::kExit,  room_token(RoomType::kBedroom),
                                   tok::kPass,  room_token(RoomType::kHallway),
                                   tok::kEnter, room_token(RoomType::kKitchen),
                                   tok::kStopAt, room_token(RoomType::kKitchen)};
  std::size_t at = 0;
  for (int t : tokens)
    if (at < expect_order.size() && t == expect_order[at]) ++at;
  REQUIRE(at == expect_order.size());
}

TEST_CASE("vocabulary closure and length bound over 1000 random episodes") {
  LayoutPrior prior = LayoutPrior::household();
  int made = 0;
  for (std::uint64_t seed = 0; made < 1000; ++seed) {
    GeneratedHouse gh = generate_house(prior, 5000 + seed % 50);
    Episode ep = generate_episode(gh.house, gh.graph, static_cast<int>(seed % 50), seed, 1, 4);
    ++made;
    int hops = static_cast<int>(ep.path.size()) - 1;
    REQUIRE(static_cast<int>(ep.tokens.size()) <= 4 + 3 * hops);
    for (int t : ep.tokens) {
      REQUIRE(t >= 0);
      REQUIRE(t < kVocabSize);
    }
  }
}

TEST_CASE("generate_episode: hop bounds and shortest-path property") {
  LayoutPrior prior = LayoutPrior::household();
  GeneratedHouse gh = generate_house(prior, 77);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Episode ep = generate_episode(gh.house, gh.graph, 0, seed, 1, 1);
    REQUIRE(ep.path.size() == 2);
    REQUIRE(ep.start != ep.goal);
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < ep.path.size(); ++i)
      len += gh.graph.edge_length(ep.path[i], ep.path[i + 1]);
    REQUIRE(len == geodesic_distance(gh.graph, ep.start, ep.goal));
  }
}

TEST_CASE("split_dataset: disjoint partition, deterministic") {
  SplitRatios ratios{0.8, 0.1, 0.2};
  HouseSplit s1 = split_dataset(10, ratios, 5);
  HouseSplit s2 = split_dataset(10, ratios, 5);
  REQUIRE(s1.train_ids == s2.train_ids);
  REQUIRE(s1.unseen_ids == s2.unseen_ids);
  REQUIRE(s1.train_ids.size() == 8);
  REQUIRE(s1.unseen_ids.size() == 2);
  std::set<int> all(s1.train_ids.begin(), s1.train_ids.end());
  all.insert(s1.unseen_ids.begin(), s1.unseen_ids.end());
  REQUIRE(all.size() == 10);
  REQUIRE(*all.begin() == 0);
  REQUIRE(*all.rbegin() == 9);
  REQUIRE_THROWS_AS(split_dataset(1, ratios, 5), DataError);
}

TEST_CASE("dataset build: val_seen pairs are novel, val_unseen houses disjoint") {
  DatasetConfig cfg;
  cfg.prior = LayoutPrior::household();
  cfg.num_houses = 10;
  cfg.episodes_per_house = 3;
  cfg.seed = 9;
  Dataset ds = build_dataset(cfg);
  REQUIRE(!ds.train.empty());
  REQUIRE(!ds.val_seen.empty());
  REQUIRE(!ds.val_unseen.empty());

  std::set<int> train_houses(ds.split.train_ids.begin(), ds.split.train_ids.end());
  std::set<std::tuple<int, int, int>> train_pairs;
  for (const Episode& ep : ds.train) {
    REQUIRE(train_houses.count(ep.house_id) == 1);
    train_pairs.insert({ep.house_id, ep.start, ep.goal});
  }
  for (const Episode& ep : ds.val_seen) {
    REQUIRE(train_houses.count(ep.house_id) == 1);
    REQUIRE(train_pairs.count({ep.house_id, ep.start, ep.goal}) == 0);
  }
  for (const Episode& ep : ds.val_unseen) REQUIRE(train_houses.count(ep.house_id) == 0);
}

TEST_CASE("dataset save/load round trip with stale detection") {
  DatasetConfig cfg;
  cfg.prior = LayoutPrior::household();
  cfg.num_houses = 6;
  cfg.episodes_per_house = 2;
  cfg.seed = 4;
  Dataset ds = build_dataset(cfg);
  std::string dir = "/tmp/winnav_test_dataset";
  int rc = system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
  REQUIRE(rc == 0);
  REQUIRE(rc == 0);
  save_dataset(ds, dir, "cafebabe");
  Dataset loaded = load_dataset(dir);
  REQUIRE(loaded.houses.size() == ds.houses.size());
  REQUIRE(loaded.train.size() == ds.train.size());
  REQUIRE(loaded.train[0].tokens == ds.train[0].tokens);
  REQUIRE(loaded.split.train_ids == ds.split.train_ids);

  // corrupt one file -> stale artifact error naming it
  std::string path = dir + "/episodes_train.txt";
  std::string text = read_file(path);
  write_file(path, text + "\n# tampered\n");
  try {
    (void)load_dataset(dir);
    REQUIRE(false);
  } catch (const DataError& e) {
    REQUIRE(std::string(e.what()).find("episodes_train.txt") != std::string::npos);
  }
}
