#include "winnav/predictor/predictor.hpp"

#include <cmath>
#include <limits>

namespace winnav {

namespace {

// Marches a ray across the map grid in the agent frame (row 0 ahead),
// labeling every cell whose entry distance lies within [0, depth].
// `label_before` applies before door_t, `label_after` from door_t on.
void project_ray(LocalityMap& map, std::vector<double>& label_dist, int sector, double depth,
                 double door_t, RoomType label_before, RoomType label_after) {
  int g = map.g();
  double s = map.cell_size();
  int h = (g - 1) / 2;
  // agent-frame coordinates: x = columns (right), y = rows (down = behind)
  double px = (h + 0.5) * s;
  double py = (h + 0.5) * s;
  Vec2 d = heading_dir(sector);  // (right, forward)
  double dx = d.x, dy = -d.y;    // forward decreases the row coordinate

  int cx = h, cy = h;
  int sx = dx > 1e-12 ? 1 : dx < -1e-12 ? -1 : 0;
  int sy = dy > 1e-12 ? 1 : dy < -1e-12 ? -1 : 0;
  double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
  if (sx != 0) {
    t_max_x = ((cx + (sx > 0 ? 1 : 0)) * s - px) / dx;
    t_delta_x = s / std::fabs(dx);
  }
  if (sy != 0) {
    t_max_y = ((cy + (sy > 0 ? 1 : 0)) * s - py) / dy;
    t_delta_y = s / std::fabs(dy);
  }

  auto label = [&](int row, int col, double t) {
    if (row < 0 || col < 0 || row >= g || col >= g) return false;
    std::size_t at = static_cast<std::size_t>(row) * g + col;
    if (t < label_dist[at]) {
      label_dist[at] = t;
      map.set_one_hot(row, col, t < door_t ? label_before : label_after);
    }
    return true;
  };

  label(cy, cx, 0.0);
  for (int guard = 0; guard < 4 * g; ++guard) {
    bool corner = sx != 0 && sy != 0 && std::fabs(t_max_x - t_max_y) < 1e-12;
    double t;
    if (corner) {
      t = t_max_x;
      cx += sx;
      cy += sy;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      t = t_max_x;
      cx += sx;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      cy += sy;
      t_max_y += t_delta_y;
    }
    if (t >= depth) break;
    if (!label(cy, cx, t)) break;
  }
}

}  // namespace

LocalityMap egocentric_project(const PanoramicObservation& obs, int g, double s) {
  LocalityMap map = LocalityMap::uniform_unknown(g, s);
  std::vector<double> label_dist(static_cast<std::size_t>(g) * g,
                                 std::numeric_limits<double>::infinity());
  // own room type: any doorless sector reports it
  RoomType own = obs.sectors[0].type;
  for (const SectorView& sv : obs.sectors)
    if (!sv.door) {
      own = sv.type;
      break;
    }
  for (int k = 0; k < kNumHeadings; ++k) {
    const SectorView& sv = obs.sectors[static_cast<std::size_t>(k)];
    double door_t = sv.door ? sv.door_depth : std::numeric_limits<double>::infinity();
    project_ray(map, label_dist, k, sv.depth, door_t, own, sv.type);
  }
  return map;
}

PredictorNet::PredictorNet(nn::ParamStore& store, const PredictorConfig& cfg, bool create)
    : cfg_(cfg), store_(&store) {
  int in_dim = 2 * cfg.map_dim();
  int lstm_in = cfg.map_feature_dim + cfg.action_emb_dim;
  if (create) {
    w_map_ = &store.create("pred.w_map", in_dim, cfg.map_feature_dim);
    b_map_ = &store.create_zeros("pred.b_map", 1, cfg.map_feature_dim);
    action_emb_ = &store.create("pred.action_emb", kNumActionIds, cfg.action_emb_dim);
    lstm_ = nn::LstmParams::create(store, "pred.lstm", lstm_in, cfg.hidden);
    w_out_ = &store.create("pred.w_out", cfg.hidden, cfg.map_dim());
    b_out_ = &store.create_zeros("pred.b_out", 1, cfg.map_dim());
  } else {
    w_map_ = &store.get("pred.w_map");
    b_map_ = &store.get("pred.b_map");
    action_emb_ = &store.get("pred.action_emb");
    lstm_ = nn::LstmParams::bind(store, "pred.lstm");
    w_out_ = &store.get("pred.w_out");
    b_out_ = &store.get("pred.b_out");
    if (w_map_->rows != in_dim || w_out_->cols != cfg.map_dim())
      throw DataError("predictor checkpoint dims do not match config");
  }
}

nn::Tensor PredictorNet::map_feature(nn::Tape& tape, const LocalityMap& m_prev,
                                     const LocalityMap& m_t) const {
  if (m_prev.g() != cfg_.g || m_t.g() != cfg_.g)
    throw UsageError("map_feature: locality map size mismatch");
  std::vector<double> concat;
  concat.reserve(static_cast<std::size_t>(2 * cfg_.map_dim()));
  concat.insert(concat.end(), m_prev.flat().begin(), m_prev.flat().end());
  concat.insert(concat.end(), m_t.flat().begin(), m_t.flat().end());
  nn::Tensor x = tape.constant(1, 2 * cfg_.map_dim(), std::move(concat));
  return nn::bias_add(nn::matmul(x, tape.param(*w_map_)), tape.param(*b_map_));
}

nn::Tensor PredictorNet::decoder_step(nn::Tape& tape, const nn::Tensor& m_feat, int prev_action_id,
                                      nn::LstmState& state) const {
  if (!state.h.valid()) throw UsageError("decoder_step: state not initialized");
  if (prev_action_id < 0 || prev_action_id >= kNumActionIds)
    throw UsageError("decoder_step: bad action id");
  nn::Tensor a = nn::embedding_lookup(tape.param(*action_emb_), {prev_action_id});
  nn::Tensor x = nn::concat_cols(m_feat, a);
  state = nn::lstm_step(tape, x, state, lstm_);
  return state.h;
}

nn::Tensor PredictorNet::predict_map(nn::Tape& tape, const nn::Tensor& h) const {
  nn::Tensor logits = nn::bias_add(nn::matmul(h, tape.param(*w_out_)), tape.param(*b_out_));
  // reshape [1, g*g*C] -> [g*g, C] is free: row-major layout matches
  nn::Tensor grid{logits.tape, logits.id, cfg_.cells(), kNumRoomCategories};
  return nn::softmax_rows(grid);
}

nn::Tensor PredictorNet::step(nn::Tape& tape, const LocalityMap& m_prev, const LocalityMap& m_t,
                              int prev_action_id, nn::LstmState& state) const {
  nn::Tensor mf = map_feature(tape, m_prev, m_t);
  nn::Tensor h = decoder_step(tape, mf, prev_action_id, state);
  return predict_map(tape, h);
}

LocalityMap PredictorNet::map_from_rows(const std::vector<double>& rows, int g, double s) {
  LocalityMap map(g, s);
  map.flat_mut() = rows;
  return map;
}

}  // namespace winnav
