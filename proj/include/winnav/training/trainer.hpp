#pragma once

#include <string>
#include <vector>

#include "winnav/nn/checkpoint.hpp"
#include "winnav/training/rollout.hpp"

namespace winnav {

// Imitation loss over a rollout: per-step cross-entropy of the action
// distribution against the teacher action, plus (when the locality pathway
// is active) the global-goal head's cross-entropy against the goal cell.
// Summed over steps, unnormalized.
nn::Tensor il_loss(nn::Tape& tape, const Rollout& rollout, double goal_coef = 1.0);

struct A2cConfig {
  double gamma = 0.95;
  double value_coef = 0.5;
  double lambda_il = 0.2;
};

// Discounted returns of a rollout's reward sequence.
std::vector<double> discounted_returns(const Rollout& rollout, double gamma);

// A2C loss with an imitation term: -sum log p(a_t) A_t + value regression
// + lambda_IL * IL loss, over one sampled rollout.
nn::Tensor a2c_loss(nn::Tape& tape, const Rollout& rollout, const A2cConfig& cfg);

struct AgentTrainConfig {
  AgentConfig agent;
  MapType train_map = MapType::kPredicted;
  RunnerConfig runner;
  A2cConfig a2c;
  int updates = 1200;
  int batch = 8;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double goal_coef = 1.0;
  int eval_interval = 150;
  int eval_episodes = 1 << 30;
  std::uint64_t seed = 1;
};

struct AgentTrainResult {
  nn::ParamStore params;  // best-SPL snapshot
  std::string log_csv;    // update,phase,loss,val_sr,val_spl
  double best_spl = 0.0;
  double best_sr = 0.0;
  std::vector<double> il_losses;
  std::vector<double> rl_losses;
  std::vector<double> entropies;
};

// Alternates teacher-forced IL batches and sampled A2C batches; evaluates
// ValUnseen SPL on a schedule and keeps the best snapshot. The predictor is
// frozen throughout. Errors if the WIN configuration lacks a predictor.
AgentTrainResult train_agent(const Dataset& ds, const PredictorNet* predictor,
                             const AgentTrainConfig& cfg);

}  // namespace winnav
