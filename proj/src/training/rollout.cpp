#include "winnav/training/rollout.hpp"

#include <algorithm>
#include <cmath>

namespace winnav {

MapType map_type_from_name(const std::string& name) {
  for (MapType m : {MapType::kRandomTypeRandomDir, MapType::kRandomDirGtType, MapType::kPredicted,
                    MapType::kGt, MapType::kNone})
    if (name == map_type_name(m)) return m;
  throw UsageError("unknown map type: " + name);
}

int teacher_action(const NavGraph& graph, int current, int goal) {
  if (current == goal) return -1;
  std::vector<int> path = shortest_path_nodes(graph, current, goal);
  return path[1];
}

double step_reward(double prev_dist, double new_dist, bool terminal, bool success) {
  double r = prev_dist - new_dist;
  if (terminal) r += success ? 2.0 : -2.0;
  return r;
}

LocalityMap locality_map_for(MapType type, const HouseLayout& house, const Pose& pose,
                             const PanoramicObservation& obs, int g, double s,
                             const PredictorNet* predictor, nn::Tape* pred_tape,
                             nn::LstmState* pred_state, LocalityMap* m_prev, int prev_action,
                             Rng& map_rng) {
  switch (type) {
    case MapType::kGt:
      return ground_truth_locality_map(house, pose, g, s);
    case MapType::kRandomTypeRandomDir: {
      LocalityMap m(g, s);
      for (int r = 0; r < g; ++r)
        for (int c = 0; c < g; ++c)
          m.set_one_hot(r, c, static_cast<RoomType>(map_rng.uniform_int(kNumGeneratedTypes)));
      return m;
    }
    case MapType::kRandomDirGtType: {
      LocalityMap gt = ground_truth_locality_map(house, pose, g, s);
      std::vector<int> perm(static_cast<std::size_t>(g) * g);
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
      for (std::size_t i = perm.size() - 1; i > 0; --i)
        std::swap(perm[i], perm[map_rng.uniform_int(i + 1)]);
      LocalityMap m(g, s);
      for (int cell = 0; cell < g * g; ++cell) {
        int src = perm[static_cast<std::size_t>(cell)];
        m.set_distribution(cell / g, cell % g, gt.cell(src / g, src % g));
      }
      return m;
    }
    case MapType::kPredicted: {
      LocalityMap m_t = egocentric_project(obs, g, s);
      nn::Tensor p = predictor->step(*pred_tape, *m_prev, m_t, prev_action, *pred_state);
      *m_prev = m_t;
      return PredictorNet::map_from_rows(p.values(), g, s);
    }
    case MapType::kNone:
      throw UsageError("locality_map_for called with MapType::kNone");
  }
  throw UsageError("bad map type");
}

namespace {

int argmax_index(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return best;
}

int sample_index(const std::vector<double>& v, Rng& rng) {
  double r = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    acc += v[static_cast<std::size_t>(i)];
    if (r < acc) return i;
  }
  return static_cast<int>(v.size()) - 1;
}

double dist_entropy(const std::vector<double>& v) {
  double h = 0.0;
  for (double p : v)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace

Rollout EpisodeRunner::run(nn::Tape& tape, const GeneratedHouse& gh, const Episode& ep,
                           PolicyKind policy, Rng* sample_rng) const {
  const HouseLayout& house = gh.house;
  const NavGraph& graph = gh.graph;
  bool needs_model = policy == PolicyKind::kGreedy || policy == PolicyKind::kSample ||
                     policy == PolicyKind::kTeacher;
  if (needs_model && !model_) throw UsageError("policy requires a model");
  if ((policy == PolicyKind::kSample || policy == PolicyKind::kRandom) && !sample_rng)
    throw UsageError("sampling policy requires an rng");

  bool use_locality = needs_model ? model_->config().use_locality : false;
  bool track_map = needs_model && map_type_ != MapType::kNone && use_locality;

  GlobalGrid grid = GlobalGrid::covering(house);
  int goal_cell = -1;
  {
    Cell gc = grid.index_of(graph.nodes[static_cast<std::size_t>(ep.goal)].position);
    goal_cell = gc.y * grid.size() + gc.x;
  }

  InstructionEncoding instr;
  nn::Tensor state;
  std::vector<nn::Tensor> history;
  if (needs_model) {
    instr = model_->encode_instruction(tape, ep.tokens);
    state = instr.s0;
  }

  // frozen predictor state rides its own inference tape
  nn::Tape pred_tape(/*grads_enabled=*/false);
  nn::LstmState pred_state;
  LocalityMap m_prev;
  int pred_prev_action = kActionStart;
  if (track_map && map_type_ == MapType::kPredicted) {
    pred_state = predictor_->initial_state(pred_tape);
    m_prev = LocalityMap::uniform_unknown(predictor_->config().g, predictor_->config().s);
  }
  int map_g = predictor_ ? predictor_->config().g : 5;
  double map_s = predictor_ ? predictor_->config().s : house.cell_size;

  Rng map_rng = Rng::stream(cfg_.map_seed, static_cast<std::uint64_t>(ep.house_id),
                            static_cast<std::uint64_t>(ep.start) * 131 + static_cast<std::uint64_t>(ep.goal));

  Rollout out;
  int node = ep.start;
  int heading = ep.start_heading(graph);
  int turn = 0;
  out.visited.push_back(node);
  double dist_prev = geodesic_distance(graph, node, ep.goal);

  for (int t = 0; t < cfg_.max_steps; ++t) {
    Pose pose{graph.nodes[static_cast<std::size_t>(node)].position, heading};
    PanoramicObservation obs = observe(house, pose);

    if (track_map) {
      LocalityMap m = locality_map_for(map_type_, house, pose, obs, map_g, map_s, predictor_,
                                       &pred_tape, &pred_state, &m_prev, pred_prev_action, map_rng);
      fuse_into_global(grid, m, pose);
    }

    StepRecord rec;
    rec.node = node;
    rec.heading = heading;
    rec.candidate_nodes = graph.neighbors(node);
    std::sort(rec.candidate_nodes.begin(), rec.candidate_nodes.end());
    if (rec.candidate_nodes.empty() && node != ep.goal)
      throw DataError("graph corruption: node with no candidates");
    int stop_index = static_cast<int>(rec.candidate_nodes.size());
    rec.goal_cell = goal_cell;

    int teacher_node = teacher_action(graph, node, ep.goal);
    rec.teacher = stop_index;
    for (int i = 0; i < stop_index; ++i)
      if (rec.candidate_nodes[static_cast<std::size_t>(i)] == teacher_node) rec.teacher = i;

    if (needs_model) {
      std::vector<std::vector<double>> raw;
      for (int nb : rec.candidate_nodes) {
        Vec2 d = graph.nodes[static_cast<std::size_t>(nb)].position - pose.position;
        int rel = (direction_to_sector(d.x, d.y) - heading) & 7;
        raw.push_back(sector_feature(obs.sectors[static_cast<std::size_t>(rel)]));
      }
      nn::Tensor cands = model_->candidate_features(tape, raw);
      history.push_back(model_->history_token(
          tape, obs, turn, t,
          {pose.position.x / house.cell_size, pose.position.y / house.cell_size}));
      std::optional<nn::Tensor> targets;
      if (use_locality) targets = model_->target_tokens(tape, grid, instr.x0);
      FusionResult fr = model_->step(tape, state, instr, cands, history, targets);
      state = fr.state;
      rec.action_dist = fr.action_dist;
      rec.value_tensor = fr.value;
      rec.value = fr.value.values()[0];
      rec.entropy = dist_entropy(fr.action_dist.values());
      if (fr.has_goal) {
        rec.goal_dist = fr.goal_dist;
        rec.has_goal = true;
      }
    }

    switch (policy) {
      case PolicyKind::kGreedy:
        rec.chosen = argmax_index(rec.action_dist.values());
        break;
      case PolicyKind::kSample:
        rec.chosen = sample_index(rec.action_dist.values(), *sample_rng);
        break;
      case PolicyKind::kTeacher:
      case PolicyKind::kOracle:
        rec.chosen = rec.teacher;
        break;
      case PolicyKind::kRandom:
        rec.chosen = static_cast<int>(sample_rng->uniform_int(static_cast<std::uint64_t>(stop_index) + 1));
        break;
    }

    bool is_stop = rec.chosen == stop_index;
    bool forced_end = !is_stop && t + 1 == cfg_.max_steps;
    if (is_stop) {
      bool success = dist_prev <= cfg_.success_radius;
      rec.reward = step_reward(dist_prev, dist_prev, true, success);  // bonus only
      out.steps.push_back(std::move(rec));
      out.stopped = true;
      break;
    }

    int next = rec.candidate_nodes[static_cast<std::size_t>(rec.chosen)];
    double new_dist = geodesic_distance(graph, next, ep.goal);
    bool success = new_dist <= cfg_.success_radius;
    rec.reward = step_reward(dist_prev, new_dist, forced_end, success);
    out.steps.push_back(std::move(rec));

    out.traj_length += graph.edge_length(node, next);
    Vec2 d = graph.nodes[static_cast<std::size_t>(next)].position -
             graph.nodes[static_cast<std::size_t>(node)].position;
    int sector = direction_to_sector(d.x, d.y);
    turn = (sector - heading) & 7;
    pred_prev_action = turn;
    heading = sector;
    node = next;
    out.visited.push_back(node);
    dist_prev = new_dist;
    if (forced_end) break;
  }

  out.final_node = node;
  return out;
}

}  // namespace winnav
