#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "winnav/nn/tensor.hpp"
#include "winnav/util/rng.hpp"

namespace winnav::nn {

// Builds a scalar loss on the given tape. Must be deterministic in the
// parameter values it reads.
using LossFn = std::function<Tensor(Tape&)>;

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double autodiff_value = 0.0;
  double fd_value = 0.0;
  std::size_t coords_checked = 0;
};

// Central finite-difference check of reverse-mode gradients. Checks every
// coordinate when a parameter has at most `max_coords_per_param`, otherwise a
// seed-deterministic random subset of that size. Relative error uses
// |a - n| / max(|a|, |n|, denom_floor).
inline GradCheckReport grad_check(ParamStore& store, const LossFn& fn, double epsilon = 1e-5,
                                  std::size_t max_coords_per_param = 1u << 30,
                                  std::uint64_t sample_seed = 0,
                                  double denom_floor = 0.1) {
  store.zero_grads();
  {
    Tape tape;
    Tensor loss = fn(tape);
    tape.backward(loss);
  }
  auto eval = [&]() {
    Tape tape(/*grads_enabled=*/false);
    return fn(tape).scalar();
  };

  GradCheckReport rep;
  for (auto& [name, p] : store.all()) {
    std::size_t n = p.size();
    Rng rng = Rng::stream(sample_seed, Rng::mix(n), Rng::mix(name.size()));
    std::size_t count = n <= max_coords_per_param ? n : max_coords_per_param;
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t i = (n <= max_coords_per_param) ? c : rng.uniform_int(n);
      double saved = p.value[i];
      p.value[i] = saved + epsilon;
      double up = eval();
      p.value[i] = saved - epsilon;
      double down = eval();
      p.value[i] = saved;
      double fd = (up - down) / (2.0 * epsilon);
      double ad = p.grad[i];
      double denom = std::max(std::max(std::fabs(ad), std::fabs(fd)), denom_floor);
      double rel = std::fabs(ad - fd) / denom;
      ++rep.coords_checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = i;
        rep.autodiff_value = ad;
        rep.fd_value = fd;
      }
    }
  }
  return rep;
}

}  // namespace winnav::nn
