#include "winnav/nn/kernels.hpp"

#include <vector>

// Reference lane. The AVX2 lane mirrors these loops element-for-element;
// keep operation order in sync with kernels_avx2.cpp when editing.

namespace winnav::nn {
namespace {

void gemm_nn_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  // a stored [k x m]
  for (int p = 0; p < k; ++p) {
    const double* arow = a + static_cast<std::size_t>(p) * m;
    const double* brow = b + static_cast<std::size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt_acc(const double* a, const double* b, double* c, int m, int k, int n) {
  // b stored [n x k]; transpose into scratch then run the nn loop so both
  // lanes share the exact accumulation order.
  thread_local std::vector<double> scratch;
  scratch.assign(static_cast<std::size_t>(k) * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < k; ++p)
      scratch[static_cast<std::size_t>(p) * n + j] = b[static_cast<std::size_t>(j) * k + p];
  gemm_nn_acc(a, scratch.data(), c, m, k, n);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void scale(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double reduce_max(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {"scalar", gemm_nn_acc, gemm_tn_acc, gemm_nt_acc,
                            add,      sub,         mul,         scale,
                            axpy,     reduce_max};
  return k;
}

}  // namespace winnav::nn
