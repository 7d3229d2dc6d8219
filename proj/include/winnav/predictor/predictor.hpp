#pragma once

#include <string>

#include "winnav/core/locality_map.hpp"
#include "winnav/nn/lstm.hpp"
#include "winnav/nn/tensor.hpp"
#include "winnav/worldgen/observe.hpp"

namespace winnav {

// Previous-action vocabulary for the map decoder: 8 movement sectors
// relative to the agent's heading before the move, plus start/stop tokens.
inline constexpr int kActionStart = 8;
inline constexpr int kActionStop = 9;
inline constexpr int kNumActionIds = 10;

struct PredictorConfig {
  int g = 5;
  double s = kDefaultCellSize;
  int map_feature_dim = 64;
  int hidden = 64;
  int action_emb_dim = 16;

  int cells() const { return g * g; }
  int map_dim() const { return g * g * kNumRoomCategories; }
};

// Projects one panoramic observation onto the agent-centric ground plane:
// cells swept by each sector's central ray are labeled with the room type
// visible there (own room before a doorway, the glimpsed room beyond it);
// everything else stays unknown. Conflicts resolve toward the nearer ray.
LocalityMap egocentric_project(const PanoramicObservation& obs, int g, double s);

// Locality predictor: map feature over [M_{t-1}; M_t], an LSTM tracking
// map evolution under agent motion, and a per-cell softmax head.
class PredictorNet {
 public:
  PredictorNet(nn::ParamStore& store, const PredictorConfig& cfg, bool create);

  const PredictorConfig& config() const { return cfg_; }

  // m_t = [M_{t-1}; M_t] W_M + b   (linear map feature)
  nn::Tensor map_feature(nn::Tape& tape, const LocalityMap& m_prev, const LocalityMap& m_t) const;

  // h_t from the LSTM over [m_t; action embedding]; state must be initialized.
  nn::Tensor decoder_step(nn::Tape& tape, const nn::Tensor& m_feat, int prev_action_id,
                          nn::LstmState& state) const;

  // per-cell distribution over categories: [g*g, C], rows sum to 1
  nn::Tensor predict_map(nn::Tape& tape, const nn::Tensor& h) const;

  // convenience: one full step
  nn::Tensor step(nn::Tape& tape, const LocalityMap& m_prev, const LocalityMap& m_t,
                  int prev_action_id, nn::LstmState& state) const;

  nn::LstmState initial_state(nn::Tape& tape) const {
    return nn::lstm_zero_state(tape, cfg_.hidden);
  }

  static LocalityMap map_from_rows(const std::vector<double>& rows, int g, double s);

 private:
  PredictorConfig cfg_;
  nn::ParamStore* store_;
  nn::Param* w_map_;
  nn::Param* b_map_;
  nn::Param* action_emb_;
  nn::LstmParams lstm_;
  nn::Param* w_out_;
  nn::Param* b_out_;
};

}  // namespace winnav
