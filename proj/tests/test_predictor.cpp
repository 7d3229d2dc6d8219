#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "winnav/nn/grad_check.hpp"
#include "winnav/predictor/train.hpp"

using namespace winnav;

namespace {

GeneratedHouse one_cell_room() {
  GeneratedHouse gh;
  HouseLayout& h = gh.house;
  h.width = 3;
  h.height = 3;
  h.cell_size = 0.5;
  h.cells.assign(9, HouseLayout::kWallCell);
  h.at_mut({1, 1}) = 0;
  Room r;
  r.type = RoomType::kCloset;
  r.lo = r.hi = {1, 1};
  r.centroid = h.cell_center({1, 1});
  h.rooms = {r};
  gh.graph.nodes = {{0, r.centroid}};
  return gh;
}

Dataset tiny_dataset(int houses, std::uint64_t seed) {
  DatasetConfig cfg;
  cfg.prior = LayoutPrior::household();
  cfg.num_houses = houses;
  cfg.episodes_per_house = 3;
  cfg.min_hops = 1;
  cfg.max_hops = 2;
  cfg.seed = seed;
  return build_dataset(cfg);
}

}  // namespace

TEST_CASE("egocentric projection: boxed-in agent labels only the center") {
  GeneratedHouse gh = one_cell_room();
  Pose pose{gh.house.cell_center({1, 1}), 0};
  LocalityMap m = egocentric_project(observe(gh.house, pose), 5, 0.5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      if (r == 2 && c == 2)
        REQUIRE(m.argmax(r, c) == RoomType::kCloset);
      else
        REQUIRE(m.argmax(r, c) == RoomType::kUnknown);
    }
}

TEST_CASE("egocentric projection: open room labels ray cells with own type") {
  GeneratedHouse gh = fixtures::two_rooms(/*with_door=*/false);
  Pose pose{gh.house.cell_center({2, 2}), 0};
  LocalityMap m = egocentric_project(observe(gh.house, pose), 5, 0.5);
  REQUIRE(m.argmax(2, 2) == RoomType::kBedroom);
  // full axis rays lie inside the bedroom
  REQUIRE(m.argmax(1, 2) == RoomType::kBedroom);  // ahead (north)
  REQUIRE(m.argmax(2, 3) == RoomType::kBedroom);  // right (east)
  REQUIRE(m.argmax(3, 2) == RoomType::kBedroom);  // behind
  REQUIRE(m.argmax(2, 1) == RoomType::kBedroom);  // left
  // off-ray corners stay unknown
  REQUIRE(m.argmax(0, 0) == RoomType::kUnknown);
}

TEST_CASE("egocentric projection: cells beyond a door get the neighbor type") {
  GeneratedHouse gh = fixtures::two_rooms();
  // at (4,2) facing east: the door boundary is 0.25 units ahead
  Pose pose{gh.house.cell_center({4, 2}), 2};
  PanoramicObservation obs = observe(gh.house, pose);
  REQUIRE(obs.sectors[0].door);
  REQUIRE(obs.sectors[0].door_depth == doctest::Approx(0.25));
  LocalityMap m = egocentric_project(obs, 5, 0.5);
  REQUIRE(m.argmax(2, 2) == RoomType::kBedroom);  // own cell
  REQUIRE(m.argmax(1, 2) == RoomType::kKitchen);  // hand-traced: beyond the door
  REQUIRE(m.argmax(0, 2) == RoomType::kKitchen);
  // behind stays bedroom
  REQUIRE(m.argmax(3, 2) == RoomType::kBedroom);
  REQUIRE(m.argmax(4, 2) == RoomType::kBedroom);
}

TEST_CASE("map_feature: zero weights give zero, selector reproduces M_prev") {
  PredictorConfig cfg;
  cfg.g = 3;
  cfg.map_feature_dim = 3 * 3 * kNumRoomCategories;
  nn::ParamStore store(1);
  PredictorNet net(store, cfg, /*create=*/true);
  LocalityMap a = LocalityMap::uniform_unknown(3, 0.5);
  a.set_one_hot(0, 1, RoomType::kKitchen);
  LocalityMap b = LocalityMap::uniform_unknown(3, 0.5);
  b.set_one_hot(2, 2, RoomType::kGarage);

  store.zero_values();
  {
    nn::Tape tape;
    nn::Tensor m = net.map_feature(tape, a, b);
    for (double v : m.values()) REQUIRE(v == 0.0);
  }
  // selector: identity on the first block
  nn::Param& w = store.get("pred.w_map");
  for (int i = 0; i < cfg.map_dim(); ++i) w.value[static_cast<std::size_t>(i) * cfg.map_feature_dim + i] = 1.0;
  {
    nn::Tape tape;
    nn::Tensor m = net.map_feature(tape, a, b);
    REQUIRE(m.values() == a.flat());
  }
}

TEST_CASE("decoder_step: zero parameters give zero hidden state") {
  PredictorConfig cfg;
  cfg.g = 3;
  cfg.map_feature_dim = 8;
  cfg.hidden = 6;
  nn::ParamStore store(2);
  PredictorNet net(store, cfg, true);
  store.zero_values();
  nn::Tape tape;
  nn::LstmState state = net.initial_state(tape);
  nn::Tensor mf = tape.constant(1, 8, std::vector<double>(8, 0.3));
  nn::Tensor h = net.decoder_step(tape, mf, kActionStart, state);
  for (double v : h.values()) REQUIRE(v == 0.0);
}

TEST_CASE("predict_map: rows are distributions; zero params give uniform") {
  PredictorConfig cfg;
  cfg.g = 3;
  cfg.map_feature_dim = 8;
  cfg.hidden = 6;
  nn::ParamStore store(3);
  PredictorNet net(store, cfg, true);
  nn::Tape tape;
  nn::Tensor h = tape.constant(1, 6, {0.1, -0.2, 0.3, 0.4, -0.5, 0.6});
  nn::Tensor p = net.predict_map(tape, h);
  REQUIRE(p.rows == 9);
  REQUIRE(p.cols == kNumRoomCategories);
  for (int r = 0; r < p.rows; ++r) {
    double sum = 0.0;
    for (int c = 0; c < p.cols; ++c) sum += p.values()[static_cast<std::size_t>(r) * p.cols + c];
    REQUIRE(std::fabs(sum - 1.0) < 1e-12);
  }
  store.zero_values();
  nn::Tape tape2;
  nn::Tensor p2 = net.predict_map(tape2, tape2.constant(1, 6, std::vector<double>(6, 0.0)));
  for (double v : p2.values()) REQUIRE(v == doctest::Approx(1.0 / kNumRoomCategories).epsilon(1e-12));
}

TEST_CASE("uniform prediction loss equals g^2 log C with zero parameters") {
  Dataset ds = tiny_dataset(4, 21);
  PredictorConfig cfg;
  cfg.g = 5;
  cfg.map_feature_dim = 16;
  cfg.hidden = 12;
  nn::ParamStore store(4);
  PredictorNet net(store, cfg, true);
  store.zero_values();
  const Episode& ep = ds.train[0];
  nn::Tape tape;
  nn::LstmState state = net.initial_state(tape);
  LocalityMap m_prev = LocalityMap::uniform_unknown(cfg.g, cfg.s);
  double total = 0.0;
  int steps = 0;
  for (const PathStep& ps : path_rollout(ds.graph_of(ep), ep, 0)) {
    LocalityMap m_t = egocentric_project(observe(ds.house_of(ep), ps.pose), cfg.g, cfg.s);
    nn::Tensor pred = net.step(tape, m_prev, m_t, ps.prev_action_id, state);
    LocalityMap gt = ground_truth_locality_map(ds.house_of(ep), ps.pose, cfg.g, cfg.s);
    std::vector<int> targets;
    for (int r = 0; r < cfg.g; ++r)
      for (int c = 0; c < cfg.g; ++c) targets.push_back(static_cast<int>(gt.argmax(r, c)));
    total += nn::cross_entropy_rows(pred, targets).scalar();
    ++steps;
    m_prev = m_t;
  }
  double per_step = total / steps;
  REQUIRE(per_step == doctest::Approx(25.0 * std::log(14.0)).epsilon(1e-12));
}

TEST_CASE("gradients through two chained predictor steps pass the fd oracle") {
  PredictorConfig cfg;
  cfg.g = 3;
  cfg.map_feature_dim = 6;
  cfg.hidden = 5;
  cfg.action_emb_dim = 4;
  nn::ParamStore store(5);
  PredictorNet net(store, cfg, true);

  GeneratedHouse gh = fixtures::two_rooms();
  Pose pose1{gh.house.cell_center({2, 2}), 2};
  Pose pose2{gh.house.cell_center({4, 2}), 2};
  LocalityMap m1 = egocentric_project(observe(gh.house, pose1), 3, 0.5);
  LocalityMap m2 = egocentric_project(observe(gh.house, pose2), 3, 0.5);
  LocalityMap gt = ground_truth_locality_map(gh.house, pose2, 3, 0.5);
  std::vector<int> targets;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) targets.push_back(static_cast<int>(gt.argmax(r, c)));

  auto loss_fn = [&](nn::Tape& tape) {
    PredictorNet bound(store, cfg, false);
    nn::LstmState state = bound.initial_state(tape);
    LocalityMap unknown = LocalityMap::uniform_unknown(3, 0.5);
    (void)bound.step(tape, unknown, m1, kActionStart, state);
    nn::Tensor p2 = bound.step(tape, m1, m2, 0, state);
    return nn::cross_entropy_rows(p2, targets);
  };
  nn::GradCheckReport rep = nn::grad_check(store, loss_fn, 1e-5, 40, 7);
  CAPTURE(rep.worst_param);
  REQUIRE(rep.max_rel_err < 1e-4);
}

TEST_CASE("training loss trends downward on a small dataset") {
  Dataset ds = tiny_dataset(5, 33);
  PredictorTrainConfig cfg;
  cfg.net.g = 5;
  cfg.net.map_feature_dim = 24;
  cfg.net.hidden = 24;
  cfg.updates = 120;
  cfg.batch = 4;
  cfg.eval_interval = 60;
  cfg.seed = 9;
  PredictorTrainResult res = train_predictor(ds, cfg);
  REQUIRE(res.loss_history.size() == 120);
  double early = 0.0, late = 0.0;
  for (int i = 0; i < 10; ++i) {
    early += res.loss_history[static_cast<std::size_t>(i)];
    late += res.loss_history[res.loss_history.size() - 1 - static_cast<std::size_t>(i)];
  }
  REQUIRE(late < early * 0.8);

  // determinism: identical config reproduces the loss history
  PredictorTrainResult res2 = train_predictor(ds, cfg);
  REQUIRE(res2.loss_history == res.loss_history);
  REQUIRE(res2.curve_csv == res.curve_csv);
}

TEST_CASE("random-weight predictor scores near chance on occluded cells") {
  Dataset ds = tiny_dataset(4, 55);
  PredictorConfig cfg;
  cfg.g = 5;
  cfg.map_feature_dim = 16;
  cfg.hidden = 12;
  nn::ParamStore store(77);
  PredictorNet net(store, cfg, true);
  PredictorReport rep = eval_predictor(store, cfg, ds, ds.val_unseen);
  REQUIRE(rep.occluded_total > 0);
  REQUIRE(rep.occluded_acc < 0.35);  // chance-ish for untrained weights
  // confusion bookkeeping: rows sum to per-type support
  for (int t = 0; t < kNumRoomCategories; ++t) {
    std::int64_t row = 0;
    for (int u = 0; u < kNumRoomCategories; ++u)
      row += rep.confusion[static_cast<std::size_t>(t) * kNumRoomCategories + u];
    REQUIRE(row == rep.support[static_cast<std::size_t>(t)]);
  }
}
