#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "winnav/util/error.hpp"
#include "winnav/util/rng.hpp"

namespace winnav::nn {

struct Param {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> adam_m;
  std::vector<double> adam_v;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  void zero_grad() { grad.assign(size(), 0.0); }
};

// Named parameter registry. Initialization draws a dedicated stream per
// parameter name so that models sharing a name and seed get identical
// weights regardless of creation order or which other parameters exist.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t init_seed = 0) : init_seed_(init_seed) {}

  Param& create(const std::string& name, int rows, int cols) {
    if (params_.count(name)) throw UsageError("duplicate parameter: " + name);
    Param p;
    p.name = name;
    p.rows = rows;
    p.cols = cols;
    std::size_t n = p.size();
    p.value.assign(n, 0.0);
    p.grad.assign(n, 0.0);
    p.adam_m.assign(n, 0.0);
    p.adam_v.assign(n, 0.0);
    Rng rng = Rng::stream(init_seed_, fnv(name));
    double bound = 1.0 / std::sqrt(static_cast<double>(rows > 1 ? rows : cols));
    for (std::size_t i = 0; i < n; ++i) p.value[i] = (2.0 * rng.uniform() - 1.0) * bound;
    auto [it, ok] = params_.emplace(name, std::move(p));
    (void)ok;
    return it->second;
  }

  Param& create_zeros(const std::string& name, int rows, int cols) {
    Param& p = create(name, rows, cols);
    p.value.assign(p.size(), 0.0);
    return p;
  }

  bool has(const std::string& name) const { return params_.count(name) != 0; }

  Param& get(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("no such parameter: " + name);
    return it->second;
  }
  const Param& get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("no such parameter: " + name);
    return it->second;
  }

  void zero_grads() {
    for (auto& [name, p] : params_) p.zero_grad();
  }

  void zero_values() {
    for (auto& [name, p] : params_) p.value.assign(p.size(), 0.0);
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& [name, p] : params_) n += p.size();
    return n;
  }

  // Deterministic iteration order (std::map is name-ordered).
  std::map<std::string, Param>& all() { return params_; }
  const std::map<std::string, Param>& all() const { return params_; }

 private:
  static std::uint64_t fnv(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::map<std::string, Param> params_;
  std::uint64_t init_seed_ = 0;
};

// Decoupled-weight-decay Adam.
struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  void step(ParamStore& store) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& [name, p] : store.all()) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        double g = p.grad[i];
        p.adam_m[i] = cfg_.beta1 * p.adam_m[i] + (1.0 - cfg_.beta1) * g;
        p.adam_v[i] = cfg_.beta2 * p.adam_v[i] + (1.0 - cfg_.beta2) * g * g;
        double mhat = p.adam_m[i] / bc1;
        double vhat = p.adam_v[i] / bc2;
        p.value[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * p.value[i]);
      }
    }
  }

  std::int64_t steps_taken() const { return t_; }
  void set_steps_taken(std::int64_t t) { t_ = t; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  AdamWConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace winnav::nn
