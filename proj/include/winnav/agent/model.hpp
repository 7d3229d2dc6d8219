#pragma once

#include <optional>
#include <string>
#include <vector>

#include "winnav/core/locality_map.hpp"
#include "winnav/nn/tensor.hpp"
#include "winnav/worldgen/observe.hpp"
#include "winnav/worldgen/vocab.hpp"

namespace winnav {

inline constexpr int kSectorFeatureDim = kNumRoomCategories + 2 + 4;  // type, depth, door, R

struct AgentConfig {
  int dim = 48;           // shared fusion dimensionality
  int max_steps = 15;     // also sizes the step encoder table
  int action_hidden = 24;
  int value_hidden = 24;
  int goal_hidden = 16;
  bool use_locality = true;  // false = no-locality baseline (no target tokens)
};

// Raw per-sector feature: one-hot type, depth, door flag, orientation.
std::vector<double> sector_feature(const SectorView& sv);

// Parameter-free sinusoidal position encoding over grid coordinates,
// shared between history tokens (agent position) and target tokens (cells).
std::vector<double> position_encoding(double x_cells, double y_cells, int dim);

struct InstructionEncoding {
  nn::Tensor tokens;  // [L, d] contextualized token features (pads excluded)
  nn::Tensor x0;      // [1, d] pooled instruction embedding
  nn::Tensor s0;      // [1, d] initial state token
};

struct FusionResult {
  nn::Tensor state;        // s_t (the fused state slot)
  nn::Tensor action_dist;  // [1, A] over candidates (+ STOP last)
  nn::Tensor value;        // [1, 1] state-value estimate
  nn::Tensor goal_dist;    // [1, N] over global cells; valid only with targets
  bool has_goal = false;
};

// The WIN policy network. The baseline is the same network constructed with
// use_locality=false: target tokens and the goal head are absent, the rest
// shares parameter names (and thus seeded initial values).
class AgentModel {
 public:
  AgentModel(nn::ParamStore& store, const AgentConfig& cfg, bool create);

  const AgentConfig& config() const { return cfg_; }

  // Embedding + one self-attention layer + mean pool. Pad tokens are
  // excluded from both attention and pooling.
  InstructionEncoding encode_instruction(nn::Tape& tape, const std::vector<int>& tokens) const;

  // H_t = f_V(panorama) + f_R(turn) + f_T(step) + f_P(position)
  nn::Tensor history_token(nn::Tape& tape, const PanoramicObservation& obs, int turn_sector,
                           int step_index, Vec2 position_cells) const;

  // Candidate feature rows: one per navigable direction plus STOP last.
  nn::Tensor candidate_features(nn::Tape& tape,
                                const std::vector<std::vector<double>>& raw_candidates) const;

  // c_i per global cell: position encoding (.) projected instruction
  // embedding (.) projected cell distribution-with-confidence.
  nn::Tensor target_tokens(nn::Tape& tape, const GlobalGrid& grid, const nn::Tensor& x0) const;

  // One fused step: cross-attention of the state over [instruction,
  // candidates, history, targets]; action distribution via the elementwise
  // product head; with targets also the global-goal distribution.
  FusionResult step(nn::Tape& tape, const nn::Tensor& state, const InstructionEncoding& instr,
                    const nn::Tensor& candidates, const std::vector<nn::Tensor>& history,
                    const std::optional<nn::Tensor>& targets) const;

  // Action head alone (exposed for the scalar-oracle test).
  nn::Tensor action_probs(nn::Tape& tape, const nn::Tensor& candidates,
                          const nn::Tensor& fused_context) const;

 private:
  AgentConfig cfg_;
  nn::ParamStore* store_;

  nn::Param* token_emb_;
  nn::Param* attn_q_;
  nn::Param* attn_k_;
  nn::Param* attn_v_;
  nn::Param* s0_w_;
  nn::Param* s0_b_;
  nn::Param* cand_w_;
  nn::Param* cand_b_;
  nn::Param* stop_emb_;
  nn::Param* hist_v_;
  nn::Param* hist_r_;
  nn::Param* hist_t_;
  nn::Param* fuse_q_;
  nn::Param* fuse_k_;
  nn::Param* fuse_v_;
  nn::Param* fuse_o_;
  nn::Param* fuse_o_b_;
  nn::Param* act1_;
  nn::Param* act1_b_;
  nn::Param* act2_;
  nn::Param* act2_b_;
  nn::Param* val1_;
  nn::Param* val1_b_;
  nn::Param* val2_;
  nn::Param* val2_b_;
  // locality pathway (WIN only)
  nn::Param* tgt_x_ = nullptr;
  nn::Param* tgt_m_ = nullptr;
  nn::Param* tgt_m_b_ = nullptr;
  nn::Param* goal1_ = nullptr;
  nn::Param* goal1_b_ = nullptr;
  nn::Param* goal2_ = nullptr;
  nn::Param* goal2_b_ = nullptr;
};

}  // namespace winnav
