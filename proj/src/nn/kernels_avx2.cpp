#include "winnav/nn/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define WINNAV_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#endif

#include <vector>

// AVX2 lane. Vectorizes across independent output elements only; the
// per-element operation order matches kernels_scalar.cpp exactly
// (multiply then add, k ascending, no FMA), so outputs are bit-identical
// to the scalar lane.

namespace winnav::nn {

#ifdef WINNAV_HAVE_AVX2_BUILD
namespace {

void gemm_nn_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<std::size_t>(p) * n;
      __m256d va = _mm256_set1_pd(av);
      int j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int p = 0; p < k; ++p) {
    const double* arow = a + static_cast<std::size_t>(p) * m;
    const double* brow = b + static_cast<std::size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c + static_cast<std::size_t>(i) * n;
      __m256d va = _mm256_set1_pd(av);
      int j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  thread_local std::vector<double> scratch;
  scratch.assign(static_cast<std::size_t>(k) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < k; ++p)
      scratch[static_cast<std::size_t>(p) * n + j] = b[static_cast<std::size_t>(j) * k + p];
  gemm_nn_acc(a, scratch.data(), c, m, k, n);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}
void scale(const double* a, double s, double* out, std::size_t n) {
  __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) out[i] = a[i] * s;
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double reduce_max(const double* a, std::size_t n) {
  // max is associative; lane split changes only which of equal values wins,
  // not the value.
  if (n < 8) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i)
      if (a[i] > m) m = a[i];
    return m;
  }
  __m256d vm = _mm256_loadu_pd(a);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(a + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

const Kernels& avx2_kernels() {
  static const Kernels k = {"avx2", gemm_nn_acc, gemm_tn_acc, gemm_nt_acc,
                            add,    sub,         mul,         scale,
                            axpy,   reduce_max};
  return k;
}

#else  // non-x86 build: no AVX2 lane

bool avx2_available() { return false; }
const Kernels& avx2_kernels() { return scalar_kernels(); }

#endif

}  // namespace winnav::nn
