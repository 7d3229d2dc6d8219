#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "winnav/agent/model.hpp"
#include "winnav/core/geometry.hpp"
#include "winnav/core/graph_ops.hpp"
#include "winnav/kb/kb.hpp"
#include "winnav/predictor/predictor.hpp"
#include "winnav/util/rng.hpp"
#include "winnav/worldgen/dataset.hpp"

namespace winnav {

// Locality source driving the map fed to fusion each step (the map-type
// ablation axis): random one-hot cells, ground-truth types at shuffled
// positions, the frozen predictor's output, or the ground truth itself.
enum class MapType { kRandomTypeRandomDir, kRandomDirGtType, kPredicted, kGt, kNone };

inline const char* map_type_name(MapType m) {
  switch (m) {
    case MapType::kRandomTypeRandomDir: return "random_type_random_dir";
    case MapType::kRandomDirGtType: return "random_dir_gt_type";
    case MapType::kPredicted: return "predicted";
    case MapType::kGt: return "gt";
    case MapType::kNone: return "none";
  }
  return "?";
}

MapType map_type_from_name(const std::string& name);

enum class PolicyKind {
  kGreedy,   // argmax of the model's action distribution
  kSample,   // sample from the model's action distribution
  kTeacher,  // model runs, teacher action executed (imitation learning)
  kOracle,   // no model: follow the teacher directly
  kRandom,   // no model: uniform over candidates + STOP
};

// Next hop on a shortest path from `current` to `goal` (deterministic
// lowest-id tie break); -1 means STOP (current == goal).
int teacher_action(const NavGraph& graph, int current, int goal);

// Per-step shaping reward plus terminal bonus.
double step_reward(double prev_dist, double new_dist, bool terminal, bool success);

struct StepRecord {
  int node = 0;
  int heading = 0;
  std::vector<int> candidate_nodes;  // sorted neighbors; STOP is index size()
  int chosen = -1;
  int teacher = -1;
  double reward = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  nn::Tensor action_dist;   // [1, A]; valid while the tape lives
  nn::Tensor value_tensor;  // [1, 1] state-value head output
  nn::Tensor goal_dist;     // [1, N] when the locality pathway is active
  bool has_goal = false;
  int goal_cell = -1;      // flat index of the goal viewpoint's global cell
};

struct Rollout {
  std::vector<StepRecord> steps;
  int final_node = 0;
  bool stopped = false;  // agent chose STOP (vs forced cutoff)
  double traj_length = 0.0;
  std::vector<int> visited;  // nodes in visit order, start included
};

struct RunnerConfig {
  double success_radius = 3.0;
  int max_steps = 15;
  std::uint64_t map_seed = 0;  // seeds the random map-type modes
};

// Shared episode executor for training and evaluation. The model is null
// for kOracle/kRandom policies; predictor state is kept on an internal
// inference tape (the predictor stays frozen).
class EpisodeRunner {
 public:
  EpisodeRunner(const AgentModel* model, const PredictorNet* predictor, MapType map_type,
                const RunnerConfig& cfg)
      : model_(model), predictor_(predictor), map_type_(map_type), cfg_(cfg) {
    if (map_type_ == MapType::kPredicted && model_ && model_->config().use_locality && !predictor_)
      throw UsageError("predicted map source requires a predictor");
  }

  Rollout run(nn::Tape& tape, const GeneratedHouse& gh, const Episode& ep, PolicyKind policy,
              Rng* sample_rng) const;

 private:
  const AgentModel* model_;
  const PredictorNet* predictor_;
  MapType map_type_;
  RunnerConfig cfg_;
};

// Locality map for one step under the requested source (exposed for the
// map-type ablation tests).
LocalityMap locality_map_for(MapType type, const HouseLayout& house, const Pose& pose,
                             const PanoramicObservation& obs, int g, double s,
                             const PredictorNet* predictor, nn::Tape* pred_tape,
                             nn::LstmState* pred_state, LocalityMap* m_prev, int prev_action,
                             Rng& map_rng);

}  // namespace winnav
