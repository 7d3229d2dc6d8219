#include "winnav/eval/metrics.hpp"

#include <algorithm>

namespace winnav {

EpisodeMetricsRow episode_metrics(const Rollout& rollout, const Episode& ep,
                                  const NavGraph& graph, double success_radius) {
  EpisodeMetricsRow row;
  row.tl = rollout.traj_length;
  row.ne = geodesic_distance(graph, rollout.final_node, ep.goal);
  row.sr = row.ne <= success_radius ? 1 : 0;
  double ideal = geodesic_distance(graph, ep.start, ep.goal);
  row.spl = row.sr ? ideal / std::max(row.tl, ideal) : 0.0;
  for (int node : rollout.visited)
    if (geodesic_distance(graph, node, ep.goal) <= success_radius) {
      row.osr = 1;
      break;
    }
  return row;
}

EvalReport aggregate_metrics(const std::vector<EpisodeMetricsRow>& rows) {
  EvalReport rep;
  rep.rows = rows;
  rep.episodes = rows.size();
  if (rows.empty()) return rep;
  for (const EpisodeMetricsRow& r : rows) {
    rep.tl += r.tl;
    rep.ne += r.ne;
    rep.sr += r.sr;
    rep.spl += r.spl;
    rep.osr += r.osr;
  }
  double n = static_cast<double>(rows.size());
  rep.tl /= n;
  rep.ne /= n;
  rep.sr = 100.0 * rep.sr / n;
  rep.spl = 100.0 * rep.spl / n;
  rep.osr = 100.0 * rep.osr / n;
  return rep;
}

EvalReport evaluate_agent(nn::ParamStore& params, const AgentConfig& agent_cfg,
                          const PredictorNet* predictor, const Dataset& ds,
                          const std::vector<Episode>& split, MapType map_type,
                          const RunnerConfig& runner_cfg, std::size_t limit) {
  AgentModel model(params, agent_cfg, /*create=*/false);
  EpisodeRunner runner(&model, predictor, map_type, runner_cfg);
  std::vector<EpisodeMetricsRow> rows;
  std::size_t n = std::min(limit, split.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Episode& ep = split[i];
    nn::Tape tape(/*grads_enabled=*/false);
    Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep,
                            PolicyKind::kGreedy, nullptr);
    rows.push_back(episode_metrics(ro, ep, ds.graph_of(ep), runner_cfg.success_radius));
  }
  return aggregate_metrics(rows);
}

EvalReport evaluate_reference(PolicyKind policy, const Dataset& ds,
                              const std::vector<Episode>& split, const RunnerConfig& runner_cfg,
                              std::uint64_t seed, std::size_t limit) {
  if (policy != PolicyKind::kOracle && policy != PolicyKind::kRandom)
    throw UsageError("evaluate_reference expects the oracle or random policy");
  EpisodeRunner runner(nullptr, nullptr, MapType::kNone, runner_cfg);
  std::vector<EpisodeMetricsRow> rows;
  Rng rng = Rng::stream(seed, 0x726566ull /* "ref" */);
  std::size_t n = std::min(limit, split.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Episode& ep = split[i];
    nn::Tape tape(/*grads_enabled=*/false);
    Rollout ro = runner.run(tape, ds.houses[static_cast<std::size_t>(ep.house_id)], ep, policy, &rng);
    rows.push_back(episode_metrics(ro, ep, ds.graph_of(ep), runner_cfg.success_radius));
  }
  return aggregate_metrics(rows);
}

}  // namespace winnav
