#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "winnav/nn/kernels.hpp"
#include "winnav/util/rng.hpp"

using namespace winnav;
using namespace winnav::nn;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double one_hot_fraction = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (one_hot_fraction > 0.0 && rng.uniform() < one_hot_fraction)
      v[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;  // exercise the zero-skip path
    else
      v[i] = rng.normal();
  }
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar and avx2 lanes are bit-identical on random gemms") {
  if (!avx2_available()) return;  // nothing to compare on this machine
  const Kernels& s = scalar_kernels();
  const Kernels& v = avx2_kernels();
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    int m = 1 + static_cast<int>(rng.uniform_int(12));
    int k = 1 + static_cast<int>(rng.uniform_int(40));
    int n = 1 + static_cast<int>(rng.uniform_int(70));
    auto a = random_vec(rng, static_cast<std::size_t>(m) * k, 0.3);
    auto b = random_vec(rng, static_cast<std::size_t>(k) * n);
    auto at = random_vec(rng, static_cast<std::size_t>(k) * m, 0.3);
    auto bt = random_vec(rng, static_cast<std::size_t>(n) * k);
    std::vector<double> c0(static_cast<std::size_t>(m) * n), c1;
    for (auto& x : c0) x = rng.normal();
    c1 = c0;

    s.gemm_nn_acc(a.data(), b.data(), c0.data(), m, k, n);
    v.gemm_nn_acc(a.data(), b.data(), c1.data(), m, k, n);
    REQUIRE(bit_equal(c0, c1));

    s.gemm_tn_acc(at.data(), b.data(), c0.data(), m, k, n);
    v.gemm_tn_acc(at.data(), b.data(), c1.data(), m, k, n);
    REQUIRE(bit_equal(c0, c1));

    s.gemm_nt_acc(a.data(), bt.data(), c0.data(), m, k, n);
    v.gemm_nt_acc(a.data(), bt.data(), c1.data(), m, k, n);
    REQUIRE(bit_equal(c0, c1));
  }
}

TEST_CASE("scalar and avx2 elementwise kernels are bit-identical") {
  if (!avx2_available()) return;
  const Kernels& s = scalar_kernels();
  const Kernels& v = avx2_kernels();
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.uniform_int(300);
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    double alpha = rng.normal();
    std::vector<double> o0(n), o1(n);

    s.add(a.data(), b.data(), o0.data(), n);
    v.add(a.data(), b.data(), o1.data(), n);
    REQUIRE(bit_equal(o0, o1));
    s.sub(a.data(), b.data(), o0.data(), n);
    v.sub(a.data(), b.data(), o1.data(), n);
    REQUIRE(bit_equal(o0, o1));
    s.mul(a.data(), b.data(), o0.data(), n);
    v.mul(a.data(), b.data(), o1.data(), n);
    REQUIRE(bit_equal(o0, o1));
    s.scale(a.data(), alpha, o0.data(), n);
    v.scale(a.data(), alpha, o1.data(), n);
    REQUIRE(bit_equal(o0, o1));

    o0 = b;
    o1 = b;
    s.axpy(alpha, a.data(), o0.data(), n);
    v.axpy(alpha, a.data(), o1.data(), n);
    REQUIRE(bit_equal(o0, o1));

    REQUIRE(s.reduce_max(a.data(), n) == v.reduce_max(a.data(), n));
  }
}

TEST_CASE("gemm_nn matches a plain triple loop") {
  const Kernels& k = kernels();
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int m = 1 + static_cast<int>(rng.uniform_int(6));
    int kk = 1 + static_cast<int>(rng.uniform_int(6));
    int n = 1 + static_cast<int>(rng.uniform_int(6));
    auto a = random_vec(rng, static_cast<std::size_t>(m) * kk);
    auto b = random_vec(rng, static_cast<std::size_t>(kk) * n);
    std::vector<double> c(static_cast<std::size_t>(m) * n, 0.0);
    k.gemm_nn_acc(a.data(), b.data(), c.data(), m, kk, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        double ref = 0.0;
        for (int p = 0; p < kk; ++p) ref += a[i * kk + p] * b[p * n + j];
        REQUIRE(c[i * n + j] == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("transpose variants agree with explicit transposition") {
  const Kernels& k = kernels();
  Rng rng(17);
  int m = 5, kk = 7, n = 4;
  auto a = random_vec(rng, static_cast<std::size_t>(m) * kk);
  auto b = random_vec(rng, static_cast<std::size_t>(kk) * n);
  // A^T stored [kk x m]
  std::vector<double> at(static_cast<std::size_t>(kk) * m);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < kk; ++p) at[p * m + i] = a[i * kk + p];
  // B^T stored [n x kk]
  std::vector<double> bt(static_cast<std::size_t>(n) * kk);
  for (int p = 0; p < kk; ++p)
    for (int j = 0; j < n; ++j) bt[j * kk + p] = b[p * n + j];

  std::vector<double> ref(static_cast<std::size_t>(m) * n, 0.0);
  k.gemm_nn_acc(a.data(), b.data(), ref.data(), m, kk, n);

  std::vector<double> c1(ref.size(), 0.0), c2(ref.size(), 0.0);
  k.gemm_tn_acc(at.data(), b.data(), c1.data(), m, kk, n);
  k.gemm_nt_acc(a.data(), bt.data(), c2.data(), m, kk, n);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    REQUIRE(c1[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    REQUIRE(c2[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}
