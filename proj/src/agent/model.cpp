#include "winnav/agent/model.hpp"

#include <cmath>

namespace winnav {

std::vector<double> sector_feature(const SectorView& sv) {
  std::vector<double> f(kSectorFeatureDim, 0.0);
  f[static_cast<std::size_t>(sv.type)] = 1.0;
  f[kNumRoomCategories] = sv.depth / 5.0;  // keep magnitudes near unity
  f[kNumRoomCategories + 1] = sv.door ? 1.0 : 0.0;
  for (int i = 0; i < 4; ++i) f[static_cast<std::size_t>(kNumRoomCategories + 2 + i)] = sv.orientation[static_cast<std::size_t>(i)];
  return f;
}

std::vector<double> position_encoding(double x_cells, double y_cells, int dim) {
  std::vector<double> pe(static_cast<std::size_t>(dim), 0.0);
  int bands = dim / 4;
  double freq = 1.5707963267948966;  // pi/2 per cell at the finest band
  for (int i = 0; i < bands; ++i) {
    pe[static_cast<std::size_t>(4 * i + 0)] = std::sin(x_cells * freq);
    pe[static_cast<std::size_t>(4 * i + 1)] = std::cos(x_cells * freq);
    pe[static_cast<std::size_t>(4 * i + 2)] = std::sin(y_cells * freq);
    pe[static_cast<std::size_t>(4 * i + 3)] = std::cos(y_cells * freq);
    freq *= 0.5;
  }
  return pe;
}

AgentModel::AgentModel(nn::ParamStore& store, const AgentConfig& cfg, bool create)
    : cfg_(cfg), store_(&store) {
  int d = cfg.dim;
  auto get = [&](const char* name, int rows, int cols, bool zeros = false) -> nn::Param* {
    if (create) return zeros ? &store.create_zeros(name, rows, cols) : &store.create(name, rows, cols);
    return &store.get(name);
  };
  token_emb_ = get("agent.token_emb", kVocabSize, d);
  attn_q_ = get("agent.attn_q", d, d);
  attn_k_ = get("agent.attn_k", d, d);
  attn_v_ = get("agent.attn_v", d, d);
  s0_w_ = get("agent.s0_w", d, d);
  s0_b_ = get("agent.s0_b", 1, d, true);
  cand_w_ = get("agent.cand_w", kSectorFeatureDim, d);
  cand_b_ = get("agent.cand_b", 1, d, true);
  stop_emb_ = get("agent.stop_emb", 1, d);
  hist_v_ = get("agent.hist_v", kNumHeadings * kSectorFeatureDim, d);
  hist_r_ = get("agent.hist_r", 4, d);
  hist_t_ = get("agent.hist_t", cfg.max_steps + 1, d);
  fuse_q_ = get("agent.fuse_q", d, d);
  fuse_k_ = get("agent.fuse_k", d, d);
  fuse_v_ = get("agent.fuse_v", d, d);
  fuse_o_ = get("agent.fuse_o", d, d);
  fuse_o_b_ = get("agent.fuse_o_b", 1, d, true);
  act1_ = get("agent.act1", d, cfg.action_hidden);
  act1_b_ = get("agent.act1_b", 1, cfg.action_hidden, true);
  act2_ = get("agent.act2", cfg.action_hidden, 1);
  act2_b_ = get("agent.act2_b", 1, 1, true);
  val1_ = get("agent.val1", d, cfg.value_hidden);
  val1_b_ = get("agent.val1_b", 1, cfg.value_hidden, true);
  val2_ = get("agent.val2", cfg.value_hidden, 1);
  val2_b_ = get("agent.val2_b", 1, 1, true);
  if (cfg.use_locality) {
    tgt_x_ = get("agent.tgt_x", d, d);
    tgt_m_ = get("agent.tgt_m", kNumRoomCategories + 1, d);
    tgt_m_b_ = get("agent.tgt_m_b", 1, d, true);
    goal1_ = get("agent.goal1", d, cfg.goal_hidden);
    goal1_b_ = get("agent.goal1_b", 1, cfg.goal_hidden, true);
    goal2_ = get("agent.goal2", cfg.goal_hidden, 1);
    goal2_b_ = get("agent.goal2_b", 1, 1, true);
  }
}

InstructionEncoding AgentModel::encode_instruction(nn::Tape& tape,
                                                   const std::vector<int>& tokens) const {
  std::vector<int> real;
  for (int t : tokens) {
    if (t < 0 || t >= kVocabSize) throw UsageError("encode_instruction: unknown token id");
    if (t != tok::kPad) real.push_back(t);
  }
  if (real.empty()) throw UsageError("encode_instruction: empty instruction");
  int L = static_cast<int>(real.size());
  nn::Tensor x = nn::embedding_lookup(tape.param(*token_emb_), real);
  nn::Tensor q = nn::matmul(x, tape.param(*attn_q_));
  nn::Tensor k = nn::matmul(x, tape.param(*attn_k_));
  nn::Tensor v = nn::matmul(x, tape.param(*attn_v_));
  nn::Tensor scores = nn::scale(nn::matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(cfg_.dim)));
  nn::Tensor attn = nn::softmax_rows(scores);
  nn::Tensor ctx = nn::add(x, nn::matmul(attn, v));
  std::vector<double> pool(static_cast<std::size_t>(L), 1.0 / static_cast<double>(L));
  nn::Tensor x0 = nn::matmul(tape.constant(1, L, pool), ctx);
  nn::Tensor s0 = nn::tanh_op(nn::bias_add(nn::matmul(x0, tape.param(*s0_w_)), tape.param(*s0_b_)));
  return {ctx, x0, s0};
}

nn::Tensor AgentModel::history_token(nn::Tape& tape, const PanoramicObservation& obs,
                                     int turn_sector, int step_index, Vec2 position_cells) const {
  std::vector<double> pano;
  pano.reserve(static_cast<std::size_t>(kNumHeadings) * kSectorFeatureDim);
  for (const SectorView& sv : obs.sectors) {
    std::vector<double> f = sector_feature(sv);
    pano.insert(pano.end(), f.begin(), f.end());
  }
  nn::Tensor fv = nn::matmul(tape.constant(1, kNumHeadings * kSectorFeatureDim, std::move(pano)),
                             tape.param(*hist_v_));
  static const double kCos45[8] = {1.0, 0.7071067811865476, 0.0, -0.7071067811865476,
                                   -1.0, -0.7071067811865476, 0.0, 0.7071067811865476};
  static const double kSin45[8] = {0.0, 0.7071067811865476, 1.0, 0.7071067811865476,
                                   0.0, -0.7071067811865476, -1.0, -0.7071067811865476};
  int ts = turn_sector & 7;
  nn::Tensor fr = nn::matmul(tape.constant(1, 4, {kCos45[ts], kSin45[ts], 1.0, 0.0}),
                             tape.param(*hist_r_));
  int step = step_index < cfg_.max_steps ? step_index : cfg_.max_steps;
  nn::Tensor ft = nn::embedding_lookup(tape.param(*hist_t_), {step});
  nn::Tensor fp = tape.constant(1, cfg_.dim, position_encoding(position_cells.x, position_cells.y, cfg_.dim));
  return nn::add(nn::add(fv, fr), nn::add(ft, fp));
}

nn::Tensor AgentModel::candidate_features(
    nn::Tape& tape, const std::vector<std::vector<double>>& raw_candidates) const {
  std::vector<double> flat;
  flat.reserve(raw_candidates.size() * kSectorFeatureDim);
  for (const auto& r : raw_candidates) {
    if (r.size() != kSectorFeatureDim) throw UsageError("bad candidate feature size");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  nn::Tensor raw = tape.constant(static_cast<int>(raw_candidates.size()), kSectorFeatureDim,
                                 std::move(flat));
  nn::Tensor proj = nn::tanh_op(nn::bias_add(nn::matmul(raw, tape.param(*cand_w_)), tape.param(*cand_b_)));
  return nn::concat_rows({proj, tape.param(*stop_emb_)});
}

nn::Tensor AgentModel::target_tokens(nn::Tape& tape, const GlobalGrid& grid,
                                     const nn::Tensor& x0) const {
  if (!cfg_.use_locality) throw UsageError("target_tokens on a no-locality baseline");
  int n = grid.size();
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(n) * n * (kNumRoomCategories + 1));
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(n) * n * cfg_.dim);
  double dist[kNumRoomCategories];
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      grid.distribution(ix, iy, dist);
      raw.insert(raw.end(), dist, dist + kNumRoomCategories);
      raw.push_back(grid.confidence(ix, iy));
      std::vector<double> pe = position_encoding(ix + 0.5, iy + 0.5, cfg_.dim);
      pos.insert(pos.end(), pe.begin(), pe.end());
    }
  }
  int cells = n * n;
  nn::Tensor m = nn::tanh_op(nn::bias_add(
      nn::matmul(tape.constant(cells, kNumRoomCategories + 1, std::move(raw)), tape.param(*tgt_m_)),
      tape.param(*tgt_m_b_)));
  nn::Tensor xp = nn::matmul(x0, tape.param(*tgt_x_));  // [1, d]
  nn::Tensor pe = tape.constant(cells, cfg_.dim, std::move(pos));
  return nn::mul_row_broadcast(nn::elementwise_mul(pe, m), xp);
}

nn::Tensor AgentModel::action_probs(nn::Tape& tape, const nn::Tensor& candidates,
                                    const nn::Tensor& fused_context) const {
  if (candidates.rows < 1) throw UsageError("action_probs: no candidates");
  nn::Tensor x = nn::mul_row_broadcast(candidates, fused_context);
  nn::Tensor h = nn::tanh_op(nn::bias_add(nn::matmul(x, tape.param(*act1_)), tape.param(*act1_b_)));
  nn::Tensor logits = nn::bias_add(nn::matmul(h, tape.param(*act2_)), tape.param(*act2_b_));
  return nn::softmax_rows(nn::transpose(logits));
}

FusionResult AgentModel::step(nn::Tape& tape, const nn::Tensor& state,
                              const InstructionEncoding& instr, const nn::Tensor& candidates,
                              const std::vector<nn::Tensor>& history,
                              const std::optional<nn::Tensor>& targets) const {
  std::vector<nn::Tensor> token_parts = {instr.tokens, candidates};
  for (const nn::Tensor& h : history) token_parts.push_back(h);
  if (targets) token_parts.push_back(*targets);
  nn::Tensor tokens = nn::concat_rows(token_parts);

  nn::Tensor q = nn::matmul(state, tape.param(*fuse_q_));
  nn::Tensor k = nn::matmul(tokens, tape.param(*fuse_k_));
  nn::Tensor v = nn::matmul(tokens, tape.param(*fuse_v_));
  nn::Tensor scores = nn::scale(nn::matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(cfg_.dim)));
  nn::Tensor attn = nn::softmax_rows(scores);
  nn::Tensor ctx = nn::matmul(attn, v);
  nn::Tensor fused = nn::tanh_op(nn::bias_add(nn::matmul(ctx, tape.param(*fuse_o_)), tape.param(*fuse_o_b_)));

  FusionResult out;
  out.state = fused;
  out.action_dist = action_probs(tape, candidates, fused);
  nn::Tensor vh = nn::tanh_op(nn::bias_add(nn::matmul(fused, tape.param(*val1_)), tape.param(*val1_b_)));
  out.value = nn::bias_add(nn::matmul(vh, tape.param(*val2_)), tape.param(*val2_b_));
  if (targets) {
    nn::Tensor gx = nn::mul_row_broadcast(*targets, fused);
    nn::Tensor gh = nn::tanh_op(nn::bias_add(nn::matmul(gx, tape.param(*goal1_)), tape.param(*goal1_b_)));
    nn::Tensor glogits = nn::bias_add(nn::matmul(gh, tape.param(*goal2_)), tape.param(*goal2_b_));
    out.goal_dist = nn::softmax_rows(nn::transpose(glogits));
    out.has_goal = true;
  }
  return out;
}

}  // namespace winnav
