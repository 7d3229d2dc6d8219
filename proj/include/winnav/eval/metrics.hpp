#pragma once

#include <string>
#include <vector>

#include "winnav/training/rollout.hpp"

namespace winnav {

struct EpisodeMetricsRow {
  double tl = 0.0;   // trajectory length, units
  double ne = 0.0;   // navigation error: geodesic(final, goal)
  int sr = 0;        // success: ne <= radius
  double spl = 0.0;  // sr * L / max(P, L)
  int osr = 0;       // oracle success: closest approach within radius
};

// Standard navigation metrics for one finished trajectory.
EpisodeMetricsRow episode_metrics(const Rollout& rollout, const Episode& ep,
                                  const NavGraph& graph, double success_radius);

struct EvalReport {
  double tl = 0.0;
  double ne = 0.0;
  double sr = 0.0;   // percent
  double spl = 0.0;  // percent
  double osr = 0.0;  // percent
  std::size_t episodes = 0;
  std::vector<EpisodeMetricsRow> rows;
};

EvalReport aggregate_metrics(const std::vector<EpisodeMetricsRow>& rows);

// Greedy (argmax) rollouts of a checkpointed agent over a split.
EvalReport evaluate_agent(nn::ParamStore& params, const AgentConfig& agent_cfg,
                          const PredictorNet* predictor, const Dataset& ds,
                          const std::vector<Episode>& split, MapType map_type,
                          const RunnerConfig& runner_cfg, std::size_t limit = 1u << 30);

// Model-free reference policies (the oracle and uniform-random agents).
EvalReport evaluate_reference(PolicyKind policy, const Dataset& ds,
                              const std::vector<Episode>& split, const RunnerConfig& runner_cfg,
                              std::uint64_t seed, std::size_t limit = 1u << 30);

}  // namespace winnav
