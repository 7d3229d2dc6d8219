#include "winnav/predictor/train.hpp"

#include <algorithm>
#include <sstream>

#include "winnav/util/rng.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav {

std::vector<PathStep> path_rollout(const NavGraph& graph, const Episode& ep,
                                   int orientation_offset) {
  std::vector<PathStep> out;
  int heading = (ep.start_heading(graph) + orientation_offset) & 7;
  int prev_action = kActionStart;
  for (std::size_t i = 0; i < ep.path.size(); ++i) {
    out.push_back({{graph.nodes[static_cast<std::size_t>(ep.path[i])].position, heading},
                   prev_action});
    if (i + 1 < ep.path.size()) {
      Vec2 d = graph.nodes[static_cast<std::size_t>(ep.path[i + 1])].position -
               graph.nodes[static_cast<std::size_t>(ep.path[i])].position;
      int sector = (direction_to_sector(d.x, d.y) + orientation_offset) & 7;
      prev_action = (sector - heading) & 7;
      heading = sector;
    }
  }
  return out;
}

namespace {

std::array<int, kNumRoomCategories> house_label_permutation(std::uint64_t seed, int house_id,
                                                            bool shuffle) {
  std::array<int, kNumRoomCategories> perm{};
  for (int i = 0; i < kNumRoomCategories; ++i) perm[static_cast<std::size_t>(i)] = i;
  if (!shuffle) return perm;
  Rng rng = Rng::stream(seed, 0x73687566ull /* "shuf" */, static_cast<std::uint64_t>(house_id));
  for (int i = kNumGeneratedTypes - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  return perm;
}

std::vector<int> gt_targets(const LocalityMap& gt, const std::array<int, kNumRoomCategories>& perm) {
  std::vector<int> t;
  t.reserve(static_cast<std::size_t>(gt.g()) * gt.g());
  for (int r = 0; r < gt.g(); ++r)
    for (int c = 0; c < gt.g(); ++c)
      t.push_back(perm[static_cast<std::size_t>(gt.argmax(r, c))]);
  return t;
}

// Episode loss: sum over steps of per-cell cross entropy, plus step count.
std::pair<nn::Tensor, int> episode_loss(nn::Tape& tape, const PredictorNet& net, const Dataset& ds,
                                        const Episode& ep, int orientation,
                                        const std::array<int, kNumRoomCategories>& perm) {
  const HouseLayout& house = ds.house_of(ep);
  const NavGraph& graph = ds.graph_of(ep);
  const PredictorConfig& cfg = net.config();
  nn::LstmState state = net.initial_state(tape);
  LocalityMap m_prev = LocalityMap::uniform_unknown(cfg.g, cfg.s);
  nn::Tensor total = tape.constant_scalar(0.0);
  int steps = 0;
  for (const PathStep& ps : path_rollout(graph, ep, orientation)) {
    LocalityMap m_t = egocentric_project(observe(house, ps.pose), cfg.g, cfg.s);
    nn::Tensor pred = net.step(tape, m_prev, m_t, ps.prev_action_id, state);
    LocalityMap gt = ground_truth_locality_map(house, ps.pose, cfg.g, cfg.s);
    total = nn::add(total, nn::cross_entropy_rows(pred, gt_targets(gt, perm)));
    m_prev = m_t;
    ++steps;
  }
  return {total, steps};
}

double eval_cell_accuracy(nn::ParamStore& params, const PredictorConfig& cfg, const Dataset& ds,
                          const std::vector<Episode>& split, std::size_t limit) {
  PredictorNet net(params, cfg, /*create=*/false);
  std::int64_t hit = 0, total = 0;
  std::size_t n = std::min(limit, split.size());
  for (std::size_t e = 0; e < n; ++e) {
    const Episode& ep = split[e];
    const HouseLayout& house = ds.house_of(ep);
    nn::Tape tape(/*grads_enabled=*/false);
    nn::LstmState state = net.initial_state(tape);
    LocalityMap m_prev = LocalityMap::uniform_unknown(cfg.g, cfg.s);
    for (const PathStep& ps : path_rollout(ds.graph_of(ep), ep, 0)) {
      LocalityMap m_t = egocentric_project(observe(house, ps.pose), cfg.g, cfg.s);
      nn::Tensor pred = net.step(tape, m_prev, m_t, ps.prev_action_id, state);
      LocalityMap gt = ground_truth_locality_map(house, ps.pose, cfg.g, cfg.s);
      const auto& rows = pred.values();
      for (int cell = 0; cell < cfg.cells(); ++cell) {
        int best = 0;
        for (int t = 1; t < kNumRoomCategories; ++t)
          if (rows[static_cast<std::size_t>(cell) * kNumRoomCategories + t] >
              rows[static_cast<std::size_t>(cell) * kNumRoomCategories + best])
            best = t;
        hit += best == static_cast<int>(gt.argmax(cell / cfg.g, cell % cfg.g)) ? 1 : 0;
        ++total;
      }
      m_prev = m_t;
    }
  }
  return total > 0 ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

}  // namespace

PredictorTrainResult train_predictor(const Dataset& ds, const PredictorTrainConfig& cfg) {
  if (ds.train.empty()) throw DataError("train_predictor: empty training split");
  nn::ParamStore store(Rng::mix(cfg.seed) ^ 0x70726564ull);
  PredictorNet net(store, cfg.net, /*create=*/true);
  nn::AdamW opt({.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  Rng rng = Rng::stream(cfg.seed, 0x747261696eull /* "train" */);

  PredictorTrainResult result{nn::ParamStore(), "", 0.0, 0, 0.0, {}};
  std::ostringstream curve;
  curve << "update,loss,val_cell_acc\n";

  nn::ParamStore best = store;
  double best_acc = -1.0;

  for (int update = 0; update < cfg.updates; ++update) {
    store.zero_grads();
    nn::Tape tape;
    nn::Tensor total = tape.constant_scalar(0.0);
    int steps = 0;
    for (int b = 0; b < cfg.batch; ++b) {
      const Episode& ep = ds.train[rng.uniform_int(ds.train.size())];
      int orientation = static_cast<int>(rng.uniform_int(8));
      auto perm = house_label_permutation(cfg.seed, ep.house_id, cfg.shuffle_labels);
      auto [loss, n] = episode_loss(tape, net, ds, ep, orientation, perm);
      total = nn::add(total, loss);
      steps += n;
    }
    nn::Tensor mean = nn::scale(total, 1.0 / static_cast<double>(steps));
    double loss_value = mean.scalar();
    if (update == 0) result.first_batch_loss = loss_value;
    result.loss_history.push_back(loss_value);
    tape.backward(mean);
    opt.step(store);

    if ((update + 1) % cfg.eval_interval == 0 || update + 1 == cfg.updates) {
      const std::vector<Episode>& val = ds.val_seen.empty() ? ds.train : ds.val_seen;
      double acc = eval_cell_accuracy(store, cfg.net, ds, val, static_cast<std::size_t>(cfg.eval_episodes));
      curve << (update + 1) << "," << fmt_fixed4(loss_value) << "," << fmt_fixed4(acc) << "\n";
      if (acc > best_acc) {
        best_acc = acc;
        best = store;
      }
    }
  }

  result.params = std::move(best);
  result.curve_csv = curve.str();
  result.best_val_acc = best_acc;
  result.updates_run = cfg.updates;
  return result;
}

PredictorReport eval_predictor(nn::ParamStore& params, const PredictorConfig& cfg,
                               const Dataset& ds, const std::vector<Episode>& split,
                               const AdjacencyMatrix* kb, bool first_step_only) {
  PredictorNet net(params, cfg, /*create=*/false);
  PredictorReport rep;
  std::int64_t vis_hit = 0, occ_hit = 0, base_hit = 0;
  int majority = kb ? static_cast<int>(kb->majority_neighbor_type()) : 0;
  for (const Episode& ep : split) {
    const HouseLayout& house = ds.house_of(ep);
    nn::Tape tape(/*grads_enabled=*/false);
    nn::LstmState state = net.initial_state(tape);
    LocalityMap m_prev = LocalityMap::uniform_unknown(cfg.g, cfg.s);
    for (const PathStep& ps : path_rollout(ds.graph_of(ep), ep, 0)) {
      LocalityMap m_t = egocentric_project(observe(house, ps.pose), cfg.g, cfg.s);
      nn::Tensor pred = net.step(tape, m_prev, m_t, ps.prev_action_id, state);
      LocalityMap gt = ground_truth_locality_map(house, ps.pose, cfg.g, cfg.s);
      const auto& rows = pred.values();
      for (int cell = 0; cell < cfg.cells(); ++cell) {
        int r = cell / cfg.g, c = cell % cfg.g;
        int want = static_cast<int>(gt.argmax(r, c));
        int got = 0;
        for (int t = 1; t < kNumRoomCategories; ++t)
          if (rows[static_cast<std::size_t>(cell) * kNumRoomCategories + t] >
              rows[static_cast<std::size_t>(cell) * kNumRoomCategories + got])
            got = t;
        bool visible = m_t.argmax(r, c) != RoomType::kUnknown;
        if (visible) {
          ++rep.visible_total;
          vis_hit += got == want ? 1 : 0;
        } else if (want != static_cast<int>(RoomType::kOutside)) {
          ++rep.occluded_total;
          occ_hit += got == want ? 1 : 0;
          base_hit += majority == want ? 1 : 0;
          rep.confusion[static_cast<std::size_t>(want) * kNumRoomCategories + got]++;
          rep.support[static_cast<std::size_t>(want)]++;
        }
      }
      m_prev = m_t;
      if (first_step_only) break;
    }
  }
  if (rep.visible_total > 0) rep.visible_acc = static_cast<double>(vis_hit) / static_cast<double>(rep.visible_total);
  if (rep.occluded_total > 0) {
    rep.occluded_acc = static_cast<double>(occ_hit) / static_cast<double>(rep.occluded_total);
    rep.baseline_occluded_acc = static_cast<double>(base_hit) / static_cast<double>(rep.occluded_total);
  }
  return rep;
}

}  // namespace winnav
