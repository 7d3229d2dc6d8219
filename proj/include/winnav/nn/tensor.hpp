#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "winnav/nn/params.hpp"
#include "winnav/util/error.hpp"

namespace winnav::nn {

class Tape;

// Handle to a tape node. Values are owned by the tape; handles are cheap
// to copy and valid for the tape's lifetime.
struct Tensor {
  Tape* tape = nullptr;
  int id = -1;
  int rows = 0;
  int cols = 0;

  bool valid() const { return tape != nullptr; }
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  const std::vector<double>& values() const;
  double scalar() const;
};

// Reverse-mode tape over a fixed op set. Build a scalar loss, call
// backward(loss) once, then read gradients off the bound parameters.
class Tape {
 public:
  explicit Tape(bool grads_enabled = true) : grads_enabled_(grads_enabled) {}

  bool grads_enabled() const { return grads_enabled_; }

  // Leaf holding constant data (no gradient).
  Tensor constant(int rows, int cols, std::vector<double> values);
  Tensor constant_scalar(double v) { return constant(1, 1, {v}); }

  // Leaf bound to an external parameter; backward accumulates into p.grad.
  // Repeated calls with the same parameter return the same node.
  Tensor param(Param& p);

  // Runs reverse accumulation from a scalar loss. Errors if called twice.
  void backward(const Tensor& loss);

  // --- internals used by the op implementations ---
  struct Node {
    int rows = 0;
    int cols = 0;
    std::vector<double> val;
    std::vector<double> grad;
    bool needs_grad = false;
    Param* bound_param = nullptr;
    std::function<void(Tape&, Node&)> backprop;
  };

  Node& node(int id) { return *nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return *nodes_[static_cast<std::size_t>(id)]; }
  Tensor make(int rows, int cols, bool needs_grad);
  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
  std::unordered_map<const Param*, int> param_nodes_;
  bool grads_enabled_ = true;
  bool backward_done_ = false;
};

// ---- forward ops (all differentiable unless noted) ----

// C = A * B, shapes [m,k] x [k,n].
Tensor matmul(const Tensor& a, const Tensor& b);
// C = A * B^T, shapes [m,k] x [n,k] -> [m,n].
Tensor matmul_nt(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);             // same shape
Tensor sub(const Tensor& a, const Tensor& b);             // same shape
Tensor elementwise_mul(const Tensor& a, const Tensor& b); // same shape
Tensor scale(const Tensor& a, double s);
Tensor bias_add(const Tensor& a, const Tensor& bias);     // bias [1,n] broadcast over rows
Tensor mul_row_broadcast(const Tensor& a, const Tensor& row);  // a[m,n] * row[1,n]

Tensor concat_cols(const Tensor& a, const Tensor& b);  // [m,n1],[m,n2] -> [m,n1+n2]
Tensor concat_rows(const std::vector<Tensor>& parts);  // same cols, stacked
Tensor slice_cols(const Tensor& a, int start, int len);
Tensor transpose(const Tensor& a);

Tensor tanh_op(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor log_op(const Tensor& a);
// Row-wise softmax, numerically stabilized by max subtraction.
Tensor softmax_rows(const Tensor& a);
Tensor sum_all(const Tensor& a);  // -> [1,1]

// Rows of `table` selected by indices -> [n, table.cols].
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& indices);

// Sum over rows of -log(pred[r, target[r]]). pred rows must be
// distributions with positive mass at the target.
Tensor cross_entropy_rows(const Tensor& pred, const std::vector<int>& targets);

// Constant copy of a tensor's values: blocks gradient flow.
Tensor detach(const Tensor& a);

}  // namespace winnav::nn
