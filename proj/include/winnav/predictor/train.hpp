#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "winnav/kb/kb.hpp"
#include "winnav/nn/params.hpp"
#include "winnav/predictor/predictor.hpp"
#include "winnav/worldgen/dataset.hpp"

namespace winnav {

// One pose along a ground-truth trajectory, with the decoder's
// previous-action id (movement sector relative to the prior heading).
struct PathStep {
  Pose pose;
  int prev_action_id = kActionStart;
};

// Poses and relative actions for walking an episode's ground-truth path,
// with all headings rotated by `orientation_offset` sectors.
std::vector<PathStep> path_rollout(const NavGraph& graph, const Episode& ep,
                                   int orientation_offset);

struct PredictorTrainConfig {
  PredictorConfig net;
  int updates = 1500;
  int batch = 8;
  double lr = 1e-3;
  double weight_decay = 0.0;
  int eval_interval = 150;
  int eval_episodes = 60;  // validation subsample per evaluation
  std::uint64_t seed = 1;
  // Ablation hook: supervise with per-house shuffled room-type labels,
  // destroying cross-house layout regularities.
  bool shuffle_labels = false;
};

struct PredictorReport {
  double visible_acc = 0.0;
  double occluded_acc = 0.0;
  double baseline_occluded_acc = 0.0;  // KB-marginal majority class
  std::int64_t visible_total = 0;
  std::int64_t occluded_total = 0;
  // Confusion over occluded cells: rows = ground truth, cols = prediction.
  std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories> confusion{};
  std::array<std::int64_t, kNumRoomCategories> support{};
};

struct PredictorTrainResult {
  nn::ParamStore params;
  std::string curve_csv;  // update,loss,val_cell_acc
  double best_val_acc = 0.0;
  std::int64_t updates_run = 0;
  double first_batch_loss = 0.0;
  std::vector<double> loss_history;
};

// Supervised training against ground-truth locality maps over rollouts of
// train trajectories at all 8 orientations. Keeps the parameters of the
// best validation cell accuracy.
PredictorTrainResult train_predictor(const Dataset& ds, const PredictorTrainConfig& cfg);

// Deterministic cell-accuracy metrics over every pose of a split.
// `kb` (optional) supplies the majority-class baseline; `first_step_only`
// restricts scoring to each episode's first pose (no recurrent memory).
PredictorReport eval_predictor(nn::ParamStore& params, const PredictorConfig& cfg,
                               const Dataset& ds, const std::vector<Episode>& split,
                               const AdjacencyMatrix* kb = nullptr,
                               bool first_step_only = false);

}  // namespace winnav
