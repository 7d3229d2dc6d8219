#include "winnav/nn/kernels.hpp"

#include <cstdlib>

#include "winnav/util/error.hpp"

namespace winnav::nn {

namespace {

const Kernels* resolve(const std::string& lane) {
  if (lane == "scalar") return &scalar_kernels();
  if (lane == "avx2") {
    if (!avx2_available()) throw UsageError("avx2 kernels requested but CPU lacks AVX2");
    return &avx2_kernels();
  }
  if (lane == "auto" || lane.empty())
    return avx2_available() ? &avx2_kernels() : &scalar_kernels();
  throw UsageError("unknown kernel lane: " + lane + " (want scalar|avx2|auto)");
}

const Kernels*& active_slot() {
  static const Kernels* active = [] {
    const char* env = std::getenv("WINNAV_KERNELS");
    return resolve(env ? env : "auto");
  }();
  return active;
}

}  // namespace

const Kernels& kernels() { return *active_slot(); }

void set_kernel_lane(const std::string& lane) { active_slot() = resolve(lane); }

}  // namespace winnav::nn
