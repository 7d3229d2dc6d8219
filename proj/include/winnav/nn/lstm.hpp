#pragma once

#include "winnav/nn/tensor.hpp"

namespace winnav::nn {

// Parameters of one LSTM cell. Gate blocks in z are ordered [i, f, o, g].
struct LstmParams {
  Param* wx = nullptr;  // [input_dim, 4H]
  Param* wh = nullptr;  // [H, 4H]
  Param* b = nullptr;   // [1, 4H]

  static LstmParams create(ParamStore& store, const std::string& prefix, int input_dim,
                           int hidden) {
    LstmParams p;
    p.wx = &store.create(prefix + ".wx", input_dim, 4 * hidden);
    p.wh = &store.create(prefix + ".wh", hidden, 4 * hidden);
    p.b = &store.create_zeros(prefix + ".b", 1, 4 * hidden);
    return p;
  }

  static LstmParams bind(ParamStore& store, const std::string& prefix) {
    return {&store.get(prefix + ".wx"), &store.get(prefix + ".wh"), &store.get(prefix + ".b")};
  }

  int hidden() const { return b->cols / 4; }
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// Standard gated recurrent update:
//   z = x Wx + h Wh + b;  i,f,o = sigmoid gates;  g = tanh candidate
//   c' = f (.) c + i (.) g;  h' = o (.) tanh(c')
inline LstmState lstm_step(Tape& tape, const Tensor& x, const LstmState& prev,
                           const LstmParams& params) {
  int hidden = params.hidden();
  Tensor z = bias_add(add(matmul(x, tape.param(*params.wx)), matmul(prev.h, tape.param(*params.wh))),
                      tape.param(*params.b));
  Tensor gi = sigmoid(slice_cols(z, 0, hidden));
  Tensor gf = sigmoid(slice_cols(z, hidden, hidden));
  Tensor go = sigmoid(slice_cols(z, 2 * hidden, hidden));
  Tensor gg = tanh_op(slice_cols(z, 3 * hidden, hidden));
  Tensor c = add(elementwise_mul(gf, prev.c), elementwise_mul(gi, gg));
  Tensor h = elementwise_mul(go, tanh_op(c));
  return {h, c};
}

inline LstmState lstm_zero_state(Tape& tape, int hidden) {
  std::vector<double> zeros(static_cast<std::size_t>(hidden), 0.0);
  return {tape.constant(1, hidden, zeros), tape.constant(1, hidden, zeros)};
}

}  // namespace winnav::nn
