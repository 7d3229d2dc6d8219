#include "winnav/nn/tensor.hpp"

#include <cmath>

#include "winnav/nn/kernels.hpp"

namespace winnav::nn {

namespace {

void check_shape(bool ok, const char* op, const Tensor& a, const Tensor& b) {
  if (!ok) {
    throw UsageError(std::string("shape mismatch in ") + op + ": [" + std::to_string(a.rows) +
                     "x" + std::to_string(a.cols) + "] vs [" + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols) + "]");
  }
}

void check_same_tape(const Tensor& a, const Tensor& b) {
  if (a.tape != b.tape) throw UsageError("tensors from different tapes");
}

}  // namespace

const std::vector<double>& Tensor::values() const { return tape->node(id).val; }

double Tensor::scalar() const {
  if (rows != 1 || cols != 1) throw UsageError("scalar() on non-scalar tensor");
  return tape->node(id).val[0];
}

Tensor Tape::make(int rows, int cols, bool needs_grad) {
  auto n = std::make_unique<Node>();
  n->rows = rows;
  n->cols = cols;
  n->val.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  n->needs_grad = needs_grad && grads_enabled_;
  if (n->needs_grad) n->grad.assign(n->val.size(), 0.0);
  nodes_.push_back(std::move(n));
  return Tensor{this, static_cast<int>(nodes_.size()) - 1, rows, cols};
}

Tensor Tape::constant(int rows, int cols, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(rows) * cols)
    throw UsageError("constant: value count does not match shape");
  Tensor t = make(rows, cols, false);
  node(t.id).val = std::move(values);
  return t;
}

Tensor Tape::param(Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) {
    const Node& n = node(it->second);
    return Tensor{this, it->second, n.rows, n.cols};
  }
  Tensor t = make(p.rows, p.cols, true);
  Node& n = node(t.id);
  n.val = p.value;
  n.bound_param = &p;
  n.backprop = [](Tape&, Node& self) {
    Param& bp = *self.bound_param;
    kernels().add(bp.grad.data(), self.grad.data(), bp.grad.data(), bp.grad.size());
  };
  param_nodes_[&p] = t.id;
  return t;
}

void Tape::backward(const Tensor& loss) {
  if (backward_done_) throw UsageError("backward called twice on the same tape");
  backward_done_ = true;
  if (loss.tape != this) throw UsageError("loss from a different tape");
  if (loss.rows != 1 || loss.cols != 1) throw UsageError("backward requires a scalar loss");
  if (!grads_enabled_) throw UsageError("backward on a grads-disabled tape");
  Node& ln = node(loss.id);
  if (!ln.needs_grad) return;  // loss independent of parameters
  ln.grad[0] = 1.0;
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = *nodes_[static_cast<std::size_t>(id)];
    if (n.needs_grad && n.backprop) n.backprop(*this, n);
  }
}

namespace {

// Shorthand for constructing a differentiable unary/binary op.
template <typename Fwd, typename Bwd>
Tensor unary_op(const Tensor& a, int rows, int cols, Fwd fwd, Bwd bwd) {
  Tape& tape = *a.tape;
  Tensor out = tape.make(rows, cols, tape.node(a.id).needs_grad);
  fwd(tape.node(a.id), tape.node(out.id));
  if (tape.node(out.id).needs_grad) {
    int aid = a.id;
    tape.node(out.id).backprop = [aid, bwd](Tape& t, Tape::Node& self) {
      bwd(t.node(aid), self);
    };
  }
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_same_tape(a, b);
  check_shape(a.cols == b.rows, "matmul", a, b);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(b.id).needs_grad;
  Tensor out = tape.make(a.rows, b.cols, ng);
  kernels().gemm_nn_acc(tape.node(a.id).val.data(), tape.node(b.id).val.data(),
                        tape.node(out.id).val.data(), a.rows, a.cols, b.cols);
  if (ng) {
    int aid = a.id, bid = b.id;
    int m = a.rows, k = a.cols, n = b.cols;
    tape.node(out.id).backprop = [aid, bid, m, k, n](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      if (na.needs_grad)
        kernels().gemm_nt_acc(self.grad.data(), nb.val.data(), na.grad.data(), m, n, k);
      if (nb.needs_grad)
        kernels().gemm_tn_acc(na.val.data(), self.grad.data(), nb.grad.data(), k, m, n);
    };
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  check_same_tape(a, b);
  check_shape(a.cols == b.cols, "matmul_nt", a, b);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(b.id).needs_grad;
  Tensor out = tape.make(a.rows, b.rows, ng);
  kernels().gemm_nt_acc(tape.node(a.id).val.data(), tape.node(b.id).val.data(),
                        tape.node(out.id).val.data(), a.rows, a.cols, b.rows);
  if (ng) {
    int aid = a.id, bid = b.id;
    int m = a.rows, k = a.cols, n = b.rows;
    tape.node(out.id).backprop = [aid, bid, m, k, n](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      if (na.needs_grad)
        kernels().gemm_nn_acc(self.grad.data(), nb.val.data(), na.grad.data(), m, n, k);
      if (nb.needs_grad)
        kernels().gemm_tn_acc(self.grad.data(), na.val.data(), nb.grad.data(), n, m, k);
    };
  }
  return out;
}

namespace {

Tensor binary_same_shape(const char* name, const Tensor& a, const Tensor& b,
                         void (*fwd)(const double*, const double*, double*, std::size_t),
                         bool negate_b) {
  check_same_tape(a, b);
  check_shape(a.rows == b.rows && a.cols == b.cols, name, a, b);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(b.id).needs_grad;
  Tensor out = tape.make(a.rows, a.cols, ng);
  fwd(tape.node(a.id).val.data(), tape.node(b.id).val.data(), tape.node(out.id).val.data(),
      out.size());
  if (ng) {
    int aid = a.id, bid = b.id;
    tape.node(out.id).backprop = [aid, bid, negate_b](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      if (na.needs_grad)
        kernels().add(na.grad.data(), self.grad.data(), na.grad.data(), self.grad.size());
      if (nb.needs_grad)
        kernels().axpy(negate_b ? -1.0 : 1.0, self.grad.data(), nb.grad.data(), self.grad.size());
    };
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_same_shape("add", a, b, kernels().add, false);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_same_shape("sub", a, b, kernels().sub, true);
}

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
  check_same_tape(a, b);
  check_shape(a.rows == b.rows && a.cols == b.cols, "elementwise_mul", a, b);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(b.id).needs_grad;
  Tensor out = tape.make(a.rows, a.cols, ng);
  kernels().mul(tape.node(a.id).val.data(), tape.node(b.id).val.data(),
                tape.node(out.id).val.data(), out.size());
  if (ng) {
    int aid = a.id, bid = b.id;
    tape.node(out.id).backprop = [aid, bid](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      std::size_t n = self.grad.size();
      std::vector<double> tmp(n);
      if (na.needs_grad) {
        kernels().mul(self.grad.data(), nb.val.data(), tmp.data(), n);
        kernels().add(na.grad.data(), tmp.data(), na.grad.data(), n);
      }
      if (nb.needs_grad) {
        kernels().mul(self.grad.data(), na.val.data(), tmp.data(), n);
        kernels().add(nb.grad.data(), tmp.data(), nb.grad.data(), n);
      }
    };
  }
  return out;
}

Tensor scale(const Tensor& a, double s) {
  return unary_op(
      a, a.rows, a.cols,
      [s](const Tape::Node& in, Tape::Node& out) {
        kernels().scale(in.val.data(), s, out.val.data(), out.val.size());
      },
      [s](Tape::Node& in, const Tape::Node& self) {
        if (in.needs_grad) kernels().axpy(s, self.grad.data(), in.grad.data(), self.grad.size());
      });
}

Tensor bias_add(const Tensor& a, const Tensor& bias) {
  check_same_tape(a, bias);
  check_shape(bias.rows == 1 && bias.cols == a.cols, "bias_add", a, bias);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(bias.id).needs_grad;
  Tensor out = tape.make(a.rows, a.cols, ng);
  const auto& av = tape.node(a.id).val;
  const auto& bv = tape.node(bias.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i)
    kernels().add(av.data() + static_cast<std::size_t>(i) * a.cols, bv.data(),
                  ov.data() + static_cast<std::size_t>(i) * a.cols, static_cast<std::size_t>(a.cols));
  if (ng) {
    int aid = a.id, bid = bias.id;
    int rows = a.rows, cols = a.cols;
    tape.node(out.id).backprop = [aid, bid, rows, cols](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      if (na.needs_grad)
        kernels().add(na.grad.data(), self.grad.data(), na.grad.data(), self.grad.size());
      if (nb.needs_grad) {
        for (int i = 0; i < rows; ++i)
          kernels().add(nb.grad.data(), self.grad.data() + static_cast<std::size_t>(i) * cols,
                        nb.grad.data(), static_cast<std::size_t>(cols));
      }
    };
  }
  return out;
}

Tensor mul_row_broadcast(const Tensor& a, const Tensor& row) {
  check_same_tape(a, row);
  check_shape(row.rows == 1 && row.cols == a.cols, "mul_row_broadcast", a, row);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(row.id).needs_grad;
  Tensor out = tape.make(a.rows, a.cols, ng);
  const auto& av = tape.node(a.id).val;
  const auto& rv = tape.node(row.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i)
    kernels().mul(av.data() + static_cast<std::size_t>(i) * a.cols, rv.data(),
                  ov.data() + static_cast<std::size_t>(i) * a.cols, static_cast<std::size_t>(a.cols));
  if (ng) {
    int aid = a.id, rid = row.id;
    int rows = a.rows, cols = a.cols;
    tape.node(out.id).backprop = [aid, rid, rows, cols](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nr = t.node(rid);
      std::vector<double> tmp(static_cast<std::size_t>(cols));
      for (int i = 0; i < rows; ++i) {
        std::size_t off = static_cast<std::size_t>(i) * cols;
        if (na.needs_grad) {
          kernels().mul(self.grad.data() + off, nr.val.data(), tmp.data(), tmp.size());
          kernels().add(na.grad.data() + off, tmp.data(), na.grad.data() + off, tmp.size());
        }
        if (nr.needs_grad) {
          kernels().mul(self.grad.data() + off, na.val.data() + off, tmp.data(), tmp.size());
          kernels().add(nr.grad.data(), tmp.data(), nr.grad.data(), tmp.size());
        }
      }
    };
  }
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  check_same_tape(a, b);
  check_shape(a.rows == b.rows, "concat_cols", a, b);
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad || tape.node(b.id).needs_grad;
  int cols = a.cols + b.cols;
  Tensor out = tape.make(a.rows, cols, ng);
  const auto& av = tape.node(a.id).val;
  const auto& bv = tape.node(b.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) ov[static_cast<std::size_t>(i) * cols + j] = av[static_cast<std::size_t>(i) * a.cols + j];
    for (int j = 0; j < b.cols; ++j)
      ov[static_cast<std::size_t>(i) * cols + a.cols + j] = bv[static_cast<std::size_t>(i) * b.cols + j];
  }
  if (ng) {
    int aid = a.id, bid = b.id;
    int rows = a.rows, ac = a.cols, bc = b.cols;
    tape.node(out.id).backprop = [aid, bid, rows, ac, bc](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      Tape::Node& nb = t.node(bid);
      int cols = ac + bc;
      for (int i = 0; i < rows; ++i) {
        if (na.needs_grad)
          for (int j = 0; j < ac; ++j)
            na.grad[static_cast<std::size_t>(i) * ac + j] += self.grad[static_cast<std::size_t>(i) * cols + j];
        if (nb.needs_grad)
          for (int j = 0; j < bc; ++j)
            nb.grad[static_cast<std::size_t>(i) * bc + j] +=
                self.grad[static_cast<std::size_t>(i) * cols + ac + j];
      }
    };
  }
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw UsageError("concat_rows: empty part list");
  Tape& tape = *parts[0].tape;
  int cols = parts[0].cols;
  int rows = 0;
  bool ng = false;
  for (const Tensor& p : parts) {
    check_same_tape(parts[0], p);
    check_shape(p.cols == cols, "concat_rows", parts[0], p);
    rows += p.rows;
    ng = ng || tape.node(p.id).needs_grad;
  }
  Tensor out = tape.make(rows, cols, ng);
  auto& ov = tape.node(out.id).val;
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    const auto& pv = tape.node(p.id).val;
    for (std::size_t i = 0; i < pv.size(); ++i) ov[off + i] = pv[i];
    off += pv.size();
  }
  if (ng) {
    std::vector<int> ids;
    ids.reserve(parts.size());
    for (const Tensor& p : parts) ids.push_back(p.id);
    tape.node(out.id).backprop = [ids](Tape& t, Tape::Node& self) {
      std::size_t off = 0;
      for (int id : ids) {
        Tape::Node& n = t.node(id);
        if (n.needs_grad)
          kernels().add(n.grad.data(), self.grad.data() + off, n.grad.data(), n.val.size());
        off += n.val.size();
      }
    };
  }
  return out;
}

Tensor slice_cols(const Tensor& a, int start, int len) {
  if (start < 0 || len <= 0 || start + len > a.cols) throw UsageError("slice_cols out of range");
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad;
  Tensor out = tape.make(a.rows, len, ng);
  const auto& av = tape.node(a.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < len; ++j)
      ov[static_cast<std::size_t>(i) * len + j] = av[static_cast<std::size_t>(i) * a.cols + start + j];
  if (ng) {
    int aid = a.id, rows = a.rows, acols = a.cols;
    tape.node(out.id).backprop = [aid, rows, acols, start, len](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < len; ++j)
          na.grad[static_cast<std::size_t>(i) * acols + start + j] +=
              self.grad[static_cast<std::size_t>(i) * len + j];
    };
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad;
  Tensor out = tape.make(a.cols, a.rows, ng);
  const auto& av = tape.node(a.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j)
      ov[static_cast<std::size_t>(j) * a.rows + i] = av[static_cast<std::size_t>(i) * a.cols + j];
  if (ng) {
    int aid = a.id, rows = a.rows, cols = a.cols;
    tape.node(out.id).backprop = [aid, rows, cols](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          na.grad[static_cast<std::size_t>(i) * cols + j] +=
              self.grad[static_cast<std::size_t>(j) * rows + i];
    };
  }
  return out;
}

namespace {

template <typename F, typename DF>
Tensor pointwise(const Tensor& a, F f, DF df_from_out) {
  return unary_op(
      a, a.rows, a.cols,
      [f](const Tape::Node& in, Tape::Node& out) {
        for (std::size_t i = 0; i < in.val.size(); ++i) out.val[i] = f(in.val[i]);
      },
      [df_from_out](Tape::Node& in, const Tape::Node& self) {
        if (!in.needs_grad) return;
        for (std::size_t i = 0; i < in.grad.size(); ++i)
          in.grad[i] += self.grad[i] * df_from_out(in.val[i], self.val[i]);
      });
}

}  // namespace

Tensor tanh_op(const Tensor& a) {
  return pointwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return pointwise(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
  return pointwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor log_op(const Tensor& a) {
  return pointwise(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor softmax_rows(const Tensor& a) {
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad;
  Tensor out = tape.make(a.rows, a.cols, ng);
  const auto& av = tape.node(a.id).val;
  auto& ov = tape.node(out.id).val;
  for (int i = 0; i < a.rows; ++i) {
    const double* x = av.data() + static_cast<std::size_t>(i) * a.cols;
    double* y = ov.data() + static_cast<std::size_t>(i) * a.cols;
    double m = kernels().reduce_max(x, static_cast<std::size_t>(a.cols));
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) {
      y[j] = std::exp(x[j] - m);
      s += y[j];
    }
    kernels().scale(y, 1.0 / s, y, static_cast<std::size_t>(a.cols));
  }
  if (ng) {
    int aid = a.id, rows = a.rows, cols = a.cols;
    tape.node(out.id).backprop = [aid, rows, cols](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      if (!na.needs_grad) return;
      for (int i = 0; i < rows; ++i) {
        const double* y = self.val.data() + static_cast<std::size_t>(i) * cols;
        const double* g = self.grad.data() + static_cast<std::size_t>(i) * cols;
        double* gx = na.grad.data() + static_cast<std::size_t>(i) * cols;
        double dot = 0.0;
        for (int j = 0; j < cols; ++j) dot += g[j] * y[j];
        for (int j = 0; j < cols; ++j) gx[j] += y[j] * (g[j] - dot);
      }
    };
  }
  return out;
}

Tensor sum_all(const Tensor& a) {
  Tape& tape = *a.tape;
  bool ng = tape.node(a.id).needs_grad;
  Tensor out = tape.make(1, 1, ng);
  const auto& av = tape.node(a.id).val;
  double s = 0.0;
  for (double v : av) s += v;
  tape.node(out.id).val[0] = s;
  if (ng) {
    int aid = a.id;
    tape.node(out.id).backprop = [aid](Tape& t, Tape::Node& self) {
      Tape::Node& na = t.node(aid);
      if (!na.needs_grad) return;
      for (std::size_t i = 0; i < na.grad.size(); ++i) na.grad[i] += self.grad[0];
    };
  }
  return out;
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& indices) {
  Tape& tape = *table.tape;
  bool ng = tape.node(table.id).needs_grad;
  int n = static_cast<int>(indices.size());
  Tensor out = tape.make(n, table.cols, ng);
  const auto& tv = tape.node(table.id).val;
  auto& ov = tape.node(out.id).val;
  for (int r = 0; r < n; ++r) {
    int idx = indices[static_cast<std::size_t>(r)];
    if (idx < 0 || idx >= table.rows) throw UsageError("embedding_lookup: index out of range");
    for (int j = 0; j < table.cols; ++j)
      ov[static_cast<std::size_t>(r) * table.cols + j] = tv[static_cast<std::size_t>(idx) * table.cols + j];
  }
  if (ng) {
    int tid = table.id, cols = table.cols;
    std::vector<int> idx = indices;
    tape.node(out.id).backprop = [tid, cols, idx](Tape& t, Tape::Node& self) {
      Tape::Node& nt = t.node(tid);
      if (!nt.needs_grad) return;
      for (std::size_t r = 0; r < idx.size(); ++r)
        kernels().add(nt.grad.data() + static_cast<std::size_t>(idx[r]) * cols,
                      self.grad.data() + r * cols,
                      nt.grad.data() + static_cast<std::size_t>(idx[r]) * cols,
                      static_cast<std::size_t>(cols));
    };
  }
  return out;
}

Tensor cross_entropy_rows(const Tensor& pred, const std::vector<int>& targets) {
  if (targets.size() != static_cast<std::size_t>(pred.rows))
    throw UsageError("cross_entropy_rows: target count != row count");
  Tape& tape = *pred.tape;
  bool ng = tape.node(pred.id).needs_grad;
  Tensor out = tape.make(1, 1, ng);
  const auto& pv = tape.node(pred.id).val;
  double loss = 0.0;
  for (int r = 0; r < pred.rows; ++r) {
    int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= pred.cols) throw UsageError("cross_entropy_rows: target out of range");
    loss -= std::log(pv[static_cast<std::size_t>(r) * pred.cols + t]);
  }
  tape.node(out.id).val[0] = loss;
  if (ng) {
    int pid = pred.id, cols = pred.cols;
    std::vector<int> tg = targets;
    tape.node(out.id).backprop = [pid, cols, tg](Tape& t, Tape::Node& self) {
      Tape::Node& np = t.node(pid);
      if (!np.needs_grad) return;
      double g = self.grad[0];
      for (std::size_t r = 0; r < tg.size(); ++r) {
        std::size_t at = r * cols + static_cast<std::size_t>(tg[r]);
        np.grad[at] += g * (-1.0 / np.val[at]);
      }
    };
  }
  return out;
}

Tensor detach(const Tensor& a) {
  Tape& tape = *a.tape;
  Tensor out = tape.make(a.rows, a.cols, false);
  tape.node(out.id).val = tape.node(a.id).val;
  return out;
}

}  // namespace winnav::nn
