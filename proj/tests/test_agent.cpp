#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "winnav/agent/model.hpp"
#include "winnav/nn/grad_check.hpp"
#include "winnav/training/rollout.hpp"
#include "winnav/training/trainer.hpp"

using namespace winnav;

namespace {

Dataset small_dataset(int houses, std::uint64_t seed, int min_hops = 1, int max_hops = 2) {
  DatasetConfig cfg;
  cfg.prior = LayoutPrior::household();
  cfg.num_houses = houses;
  cfg.episodes_per_house = 3;
  cfg.min_hops = min_hops;
  cfg.max_hops = max_hops;
  cfg.seed = seed;
  return build_dataset(cfg);
}

AgentConfig tiny_agent(bool locality) {
  AgentConfig cfg;
  cfg.dim = 16;
  cfg.action_hidden = 8;
  cfg.value_hidden = 8;
  cfg.goal_hidden = 8;
  cfg.use_locality = locality;
  return cfg;
}

}  // namespace

TEST_CASE("instruction encoding ignores padding suffix and is deterministic") {
  nn::ParamStore store(11);
  AgentModel model(store, tiny_agent(true), true);
  std::vector<int> base = {tok::kExit, room_token(RoomType::kBedroom), tok::kGoStraight,
                           tok::kEnter, room_token(RoomType::kKitchen)};
  std::vector<int> padded = base;
  for (int i = 0; i < 6; ++i) padded.push_back(tok::kPad);

  nn::Tape tape;
  auto a = model.encode_instruction(tape, base);
  auto b = model.encode_instruction(tape, padded);
  REQUIRE(a.x0.values() == b.x0.values());
  REQUIRE(a.s0.values() == b.s0.values());
  auto c = model.encode_instruction(tape, base);
  REQUIRE(a.x0.values() == c.x0.values());
  REQUIRE_THROWS_AS(model.encode_instruction(tape, {999}), UsageError);
}

TEST_CASE("instruction encoder gradients pass the fd oracle") {
  nn::ParamStore store(12);
  AgentModel model(store, tiny_agent(false), true);
  std::vector<int> tokens = {tok::kExit, 1, tok::kTurnLeft, tok::kEnter, 2};
  auto loss_fn = [&](nn::Tape& tape) {
    AgentModel bound(store, tiny_agent(false), false);
    auto enc = bound.encode_instruction(tape, tokens);
    return nn::sum_all(nn::elementwise_mul(enc.s0, enc.s0));
  };
  auto rep = nn::grad_check(store, loss_fn, 1e-5, 30, 3);
  CAPTURE(rep.worst_param);
  REQUIRE(rep.max_rel_err < 1e-4);
}

TEST_CASE("history token is zero under zero parameters except position encoding") {
  nn::ParamStore store(13);
  AgentModel model(store, tiny_agent(false), true);
  store.zero_values();
  GeneratedHouse gh = fixtures::two_rooms();
  PanoramicObservation obs = observe(gh.house, {gh.house.cell_center({2, 2}), 0});
  nn::Tape tape;
  nn::Tensor h = model.history_token(tape, obs, 0, 0, {4.5, 4.5});
  std::vector<double> pe = position_encoding(4.5, 4.5, 16);
  REQUIRE(h.values() == pe);  // the three learned encoders vanish
}

TEST_CASE("target tokens: unobserved grid factorizes through position encoding") {
  nn::ParamStore store(14);
  AgentConfig cfg = tiny_agent(true);
  AgentModel model(store, cfg, true);
  GeneratedHouse gh = fixtures::two_rooms();
  GlobalGrid grid = GlobalGrid::covering(gh.house);
  nn::Tape tape;
  auto enc = model.encode_instruction(tape, {tok::kExit, 1, tok::kStopAt, 2});
  nn::Tensor tt = model.target_tokens(tape, grid, enc.x0);
  int n = grid.size();
  REQUIRE(tt.rows == n * n);
  REQUIRE(tt.cols == cfg.dim);
  // c_i = pe_i (.) common  =>  c_i[k] * pe_j[k] == c_j[k] * pe_i[k]
  std::vector<double> pe0 = position_encoding(0.5, 0.5, cfg.dim);
  std::vector<double> pe7 = position_encoding(7.5, 2.5, cfg.dim);
  std::size_t i0 = 0, i7 = static_cast<std::size_t>(2 * n + 7);
  for (int k = 0; k < cfg.dim; ++k) {
    double lhs = tt.values()[i0 * cfg.dim + k] * pe7[static_cast<std::size_t>(k)];
    double rhs = tt.values()[i7 * cfg.dim + k] * pe0[static_cast<std::size_t>(k)];
    REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("target tokens differ where fused distributions differ") {
  nn::ParamStore store(15);
  AgentConfig cfg = tiny_agent(true);
  AgentModel model(store, cfg, true);
  GeneratedHouse gh = fixtures::two_rooms();
  GlobalGrid grid = GlobalGrid::covering(gh.house);
  LocalityMap m = LocalityMap::uniform_unknown(3, 0.5);
  m.set_one_hot(1, 1, RoomType::kKitchen);
  fuse_into_global(grid, m, {gh.house.cell_center({2, 2}), 0});
  nn::Tape tape;
  auto enc = model.encode_instruction(tape, {tok::kExit, 1});
  nn::Tensor tt = model.target_tokens(tape, grid, enc.x0);
  // the observed cell's token must differ from an unobserved one beyond
  // what position encoding alone explains (cross-ratio check fails)
  Cell oc = grid.index_of(gh.house.cell_center({2, 2}));
  std::size_t obs_i = static_cast<std::size_t>(oc.y * grid.size() + oc.x);
  std::size_t other_i = obs_i + 1;
  std::vector<double> pe_obs = position_encoding(oc.x + 0.5, oc.y + 0.5, cfg.dim);
  std::vector<double> pe_oth = position_encoding(oc.x + 1.5, oc.y + 0.5, cfg.dim);
  bool differs = false;
  for (int k = 0; k < cfg.dim; ++k) {
    double lhs = tt.values()[obs_i * cfg.dim + k] * pe_oth[static_cast<std::size_t>(k)];
    double rhs = tt.values()[other_i * cfg.dim + k] * pe_obs[static_cast<std::size_t>(k)];
    if (std::fabs(lhs - rhs) > 1e-9) differs = true;
  }
  REQUIRE(differs);
}

TEST_CASE("action_probs: identical candidate rows give a uniform distribution") {
  nn::ParamStore store(16);
  AgentModel model(store, tiny_agent(false), true);
  nn::Tape tape;
  std::vector<double> row(16, 0.3);
  std::vector<double> flat;
  for (int i = 0; i < 4; ++i) flat.insert(flat.end(), row.begin(), row.end());
  nn::Tensor cands = tape.constant(4, 16, flat);
  nn::Tensor ctx = tape.constant(1, 16, std::vector<double>(16, 0.5));
  nn::Tensor dist = model.action_probs(tape, cands, ctx);
  for (double p : dist.values()) REQUIRE(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("action_probs matches the hand-evaluated formula on two candidates") {
  nn::ParamStore store(17);
  AgentConfig cfg = tiny_agent(false);
  AgentModel model(store, cfg, true);
  Rng rng(99);
  std::vector<double> c1(16), c2(16), ctx(16);
  for (int i = 0; i < 16; ++i) {
    c1[static_cast<std::size_t>(i)] = rng.normal();
    c2[static_cast<std::size_t>(i)] = rng.normal();
    ctx[static_cast<std::size_t>(i)] = rng.normal();
  }
  nn::Tape tape;
  std::vector<double> flat = c1;
  flat.insert(flat.end(), c2.begin(), c2.end());
  nn::Tensor dist = model.action_probs(tape, tape.constant(2, 16, flat), tape.constant(1, 16, ctx));

  // independent scalar evaluation of softmax_i f_A(I_i (.) ctx)
  auto head = [&](const std::vector<double>& cand) {
    const nn::Param& w1 = store.get("agent.act1");
    const nn::Param& b1 = store.get("agent.act1_b");
    const nn::Param& w2 = store.get("agent.act2");
    const nn::Param& b2 = store.get("agent.act2_b");
    double logit = b2.value[0];
    for (int h = 0; h < cfg.action_hidden; ++h) {
      double z = b1.value[static_cast<std::size_t>(h)];
      for (int i = 0; i < cfg.dim; ++i)
        z += cand[static_cast<std::size_t>(i)] * ctx[static_cast<std::size_t>(i)] *
             w1.value[static_cast<std::size_t>(i) * cfg.action_hidden + h];
      logit += std::tanh(z) * w2.value[static_cast<std::size_t>(h)];
    }
    return logit;
  };
  double l1 = head(c1), l2 = head(c2);
  double m = std::max(l1, l2);
  double e1 = std::exp(l1 - m), e2 = std::exp(l2 - m);
  REQUIRE(dist.values()[0] == doctest::Approx(e1 / (e1 + e2)).epsilon(1e-12));
  REQUIRE(dist.values()[1] == doctest::Approx(e2 / (e1 + e2)).epsilon(1e-12));
}

TEST_CASE("baseline equals WIN with target tokens removed, under shared weights") {
  nn::ParamStore win_store(42), base_store(42);
  AgentModel win(win_store, tiny_agent(true), true);
  AgentModel baseline(base_store, tiny_agent(false), true);
  REQUIRE(base_store.total_size() < win_store.total_size());

  GeneratedHouse gh = fixtures::two_rooms();
  PanoramicObservation obs = observe(gh.house, {gh.house.cell_center({2, 2}), 0});
  std::vector<int> tokens = {tok::kExit, 1, tok::kGoStraight, tok::kEnter, 2};
  std::vector<std::vector<double>> raw = {sector_feature(obs.sectors[0]),
                                          sector_feature(obs.sectors[2])};

  auto run = [&](AgentModel& m, nn::ParamStore& store) {
    (void)store;
    nn::Tape tape;
    auto enc = m.encode_instruction(tape, tokens);
    nn::Tensor cands = m.candidate_features(tape, raw);
    nn::Tensor hist = m.history_token(tape, obs, 0, 0, {4.5, 4.5});
    FusionResult fr = m.step(tape, enc.s0, enc, cands, {hist}, std::nullopt);
    return fr.action_dist.values();
  };
  REQUIRE(run(win, win_store) == run(baseline, base_store));
}

TEST_CASE("full win step: valid distribution over candidates plus STOP") {
  Dataset ds = small_dataset(4, 71);
  nn::ParamStore store(19);
  AgentConfig acfg = tiny_agent(true);
  PredictorConfig pc;
  pc.map_feature_dim = 12;
  pc.hidden = 10;
  nn::ParamStore pstore(20);
  PredictorNet pred(pstore, pc, true);
  AgentModel model(store, acfg, true);
  RunnerConfig rcfg;
  EpisodeRunner runner(&model, &pred, MapType::kPredicted, rcfg);

  const Episode& ep = ds.train[0];
  nn::Tape tape;
  Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                          PolicyKind::kGreedy, nullptr);
  REQUIRE(!ro.steps.empty());
  for (const StepRecord& rec : ro.steps) {
    REQUIRE(rec.action_dist.cols == static_cast<int>(rec.candidate_nodes.size()) + 1);
    double sum = 0.0;
    for (double p : rec.action_dist.values()) {
      REQUIRE(p >= 0.0);
      sum += p;
    }
    REQUIRE(std::fabs(sum - 1.0) < 1e-9);
    REQUIRE(rec.has_goal);
  }
}

TEST_CASE("end-to-end IL loss gradients pass the fd oracle") {
  Dataset ds = small_dataset(3, 72, 1, 1);
  AgentConfig acfg = tiny_agent(true);
  PredictorConfig pc;
  pc.g = 3;
  pc.map_feature_dim = 8;
  pc.hidden = 8;
  nn::ParamStore pstore(21);
  PredictorNet pred(pstore, pc, true);
  nn::ParamStore store(22);
  AgentModel model(store, acfg, true);

  const Episode& ep = ds.train[0];
  auto loss_fn = [&](nn::Tape& tape) {
    AgentModel bound(store, acfg, false);
    RunnerConfig rcfg;
    EpisodeRunner runner(&bound, &pred, MapType::kPredicted, rcfg);
    Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                            PolicyKind::kTeacher, nullptr);
    return il_loss(tape, ro);
  };
  auto rep = nn::grad_check(store, loss_fn, 1e-5, 25, 5);
  CAPTURE(rep.worst_param);
  CAPTURE(rep.autodiff_value);
  CAPTURE(rep.fd_value);
  REQUIRE(rep.max_rel_err < 1e-4);
}

TEST_CASE("teacher action: stop at goal, next hop on path, optimal off path") {
  Dataset ds = small_dataset(5, 73);
  for (const Episode& ep : ds.train) {
    const NavGraph& g = ds.graph_of(ep);
    REQUIRE(teacher_action(g, ep.goal, ep.goal) == -1);
    REQUIRE(teacher_action(g, ep.start, ep.goal) == ep.path[1]);
    // off-path: from any node, the teacher hop must reduce geodesic distance
    // by exactly its edge length (i.e. it lies on a shortest path)
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      int node = static_cast<int>(v);
      if (node == ep.goal) continue;
      int hop = teacher_action(g, node, ep.goal);
      double expect = geodesic_distance(g, node, ep.goal);
      double via = g.edge_length(node, hop) + geodesic_distance(g, hop, ep.goal);
      REQUIRE(via == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("step_reward definition and telescoping") {
  REQUIRE(step_reward(3.0, 2.0, false, false) == 1.0);
  REQUIRE(step_reward(1.0, 1.0, true, true) == 2.0);
  REQUIRE(step_reward(5.0, 4.5, true, false) == doctest::Approx(-1.5));

  // telescoping along a shortest path: shaped sum == d(start) - d(end)
  Dataset ds = small_dataset(4, 74);
  RunnerConfig rcfg;
  EpisodeRunner runner(nullptr, nullptr, MapType::kNone, rcfg);
  for (const Episode& ep : ds.train) {
    nn::Tape tape;
    Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                            PolicyKind::kOracle, nullptr);
    double sum = 0.0;
    for (const StepRecord& rec : ro.steps) sum += rec.reward;
    double d0 = geodesic_distance(ds.graph_of(ep), ep.start, ep.goal);
    // oracle reaches the goal: shaped sum telescopes to d0, plus +2 bonus
    REQUIRE(sum == doctest::Approx(d0 + 2.0).epsilon(1e-9));
    REQUIRE(ro.final_node == ep.goal);
    REQUIRE(ro.stopped);
  }
}

TEST_CASE("il_loss of a uniform policy equals sum of log candidate counts") {
  Dataset ds = small_dataset(3, 75);
  nn::ParamStore store(23);
  AgentConfig acfg = tiny_agent(false);
  AgentModel model(store, acfg, true);
  store.zero_values();  // uniform action distributions everywhere
  RunnerConfig rcfg;
  EpisodeRunner runner(&model, nullptr, MapType::kNone, rcfg);
  const Episode& ep = ds.train[0];
  nn::Tape tape;
  Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                          PolicyKind::kTeacher, nullptr);
  double expect = 0.0;
  for (const StepRecord& rec : ro.steps)
    expect += std::log(static_cast<double>(rec.candidate_nodes.size()) + 1.0);
  nn::Tensor loss = il_loss(tape, ro);
  REQUIRE(loss.scalar() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("a2c update direction converges to the IL direction as lambda grows") {
  Dataset ds = small_dataset(3, 76);
  nn::ParamStore store(24);
  AgentConfig acfg = tiny_agent(false);
  AgentModel model(store, acfg, true);
  RunnerConfig rcfg;
  EpisodeRunner runner(&model, nullptr, MapType::kNone, rcfg);
  const Episode& ep = ds.train[0];

  auto grads_for = [&](bool pure_il, double lambda) {
    store.zero_grads();
    nn::Tape tape;
    Rng rng(555);  // identical sampling stream both times
    Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                            PolicyKind::kSample, &rng);
    nn::Tensor loss;
    if (pure_il) {
      loss = il_loss(tape, ro);
    } else {
      A2cConfig acf;
      acf.lambda_il = lambda;
      loss = a2c_loss(tape, ro, acf);
    }
    tape.backward(loss);
    std::vector<double> flat;
    for (const auto& [name, p] : store.all())
      flat.insert(flat.end(), p.grad.begin(), p.grad.end());
    return flat;
  };

  std::vector<double> g_il = grads_for(true, 0.0);
  std::vector<double> g_mixed = grads_for(false, 1e6);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < g_il.size(); ++i) {
    dot += g_il[i] * g_mixed[i];
    na += g_il[i] * g_il[i];
    nb += g_mixed[i] * g_mixed[i];
  }
  double cosine = dot / std::sqrt(na * nb);
  REQUIRE(cosine > 0.999);
}

TEST_CASE("map overrides: determinism, histogram preservation, gt center") {
  GeneratedHouse gh = fixtures::two_rooms();
  Pose pose{gh.house.cell_center({4, 2}), 0};
  PanoramicObservation obs = observe(gh.house, pose);

  Rng r1(42), r2(42);
  LocalityMap a = locality_map_for(MapType::kRandomTypeRandomDir, gh.house, pose, obs, 5, 0.5,
                                   nullptr, nullptr, nullptr, nullptr, kActionStart, r1);
  LocalityMap b = locality_map_for(MapType::kRandomTypeRandomDir, gh.house, pose, obs, 5, 0.5,
                                   nullptr, nullptr, nullptr, nullptr, kActionStart, r2);
  REQUIRE(a.flat() == b.flat());

  Rng r3(43);
  LocalityMap shuffled = locality_map_for(MapType::kRandomDirGtType, gh.house, pose, obs, 5, 0.5,
                                          nullptr, nullptr, nullptr, nullptr, kActionStart, r3);
  LocalityMap gt = ground_truth_locality_map(gh.house, pose, 5, 0.5);
  std::array<int, kNumRoomCategories> h1{}, h2{};
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      h1[static_cast<std::size_t>(gt.argmax(r, c))]++;
      h2[static_cast<std::size_t>(shuffled.argmax(r, c))]++;
    }
  REQUIRE(h1 == h2);
  REQUIRE(gt.argmax(2, 2) == RoomType::kBedroom);
}
