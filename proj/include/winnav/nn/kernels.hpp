#pragma once

#include <cstddef>
#include <string>

namespace winnav::nn {

// Hot-loop kernels behind the tensor ops. Two lanes: a scalar reference
// and an AVX2 variant selected at runtime. The lanes are bit-identical by
// construction: every output element sees the same operation sequence in
// the same order (k ascending in the gemms, multiply-then-add with no FMA
// contraction), so results do not depend on which lane ran.
struct Kernels {
  const char* name;

  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn_acc)(const double* a, const double* b, double* c, int m, int k, int n);
  // C[m x n] += A^T * B, with A stored [k x m]
  void (*gemm_tn_acc)(const double* a, const double* b, double* c, int m, int k, int n);
  // C[m x n] += A * B^T, with B stored [n x k]
  void (*gemm_nt_acc)(const double* a, const double* b, double* c, int m, int k, int n);

  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*scale)(const double* a, double s, double* out, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  double (*reduce_max)(const double* a, std::size_t n);
};

const Kernels& scalar_kernels();
bool avx2_available();
// Valid only when avx2_available(); falls back to scalar otherwise.
const Kernels& avx2_kernels();

// Active lane. Defaults to the WINNAV_KERNELS environment variable
// ("scalar", "avx2", "auto") or auto-detection.
const Kernels& kernels();
void set_kernel_lane(const std::string& lane);

}  // namespace winnav::nn
