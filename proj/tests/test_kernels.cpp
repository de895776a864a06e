#include <doctest.h>

#include <cstring>
#include <vector>

#include "requ/kernels.hpp"
#include "requ/matrix_nets.hpp"
#include "requ/network.hpp"
#include "requ/random.hpp"

using namespace requ;
namespace k = requ::kernels;

namespace {

struct Csr {
  std::size_t rows, cols;
  std::vector<int> ptr, idx;
  std::vector<double> val;
  k::CsrView view() const { return {rows, cols, ptr, idx, val}; }
};

// Random CSR with some empty rows and some long ones.
Csr random_csr(Rng& rng, std::size_t rows, std::size_t cols) {
  Csr c{rows, cols, {0}, {}, {}};
  std::uniform_real_distribution<double> v(-3.0, 3.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t n = random_index(rng, 0, 2 * cols);
    for (std::size_t i = 0; i < n; ++i) {
      c.idx.push_back(static_cast<int>(random_index(rng, 0, cols - 1)));
      c.val.push_back(v(rng));
    }
    c.ptr.push_back(static_cast<int>(c.idx.size()));
  }
  return c;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Loop oracle with the reference summation order.
std::vector<double> oracle(const Csr& c, const std::vector<double>& x,
                           const std::vector<double>& bias, bool activate) {
  std::vector<double> out(c.rows);
  for (std::size_t r = 0; r < c.rows; ++r) {
    double acc = 0.0;
    for (int p = c.ptr[r]; p < c.ptr[r + 1]; ++p) acc += c.val[p] * x[c.idx[p]];
    const double z = acc + bias[r];
    out[r] = activate ? (z > 0 ? z * z : 0.0) : z;
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("requ activation") {
    CHECK(k::requ(-2.0) == 0.0);
    CHECK(k::requ(3.0) == 9.0);
    CHECK(k::requ(0.0) == 0.0);
  }

  TEST_CASE("scalar affine equals the loop oracle exactly") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
      const Csr c = random_csr(rng, random_index(rng, 1, 13), random_index(rng, 1, 9));
      std::vector<double> x(c.cols), bias(c.rows), out(c.rows);
      for (auto& v : x) v = random_vector(rng, 1)[0];
      for (auto& v : bias) v = random_vector(rng, 1)[0];
      for (bool act : {false, true}) {
        k::scalar::affine(c.view(), x, bias, out, act);
        CHECK(bit_equal(out, oracle(c, x, bias, act)));
      }
    }
  }

  TEST_CASE("avx2 affine is bit-identical to scalar") {
    if (!k::avx2_available()) {
      MESSAGE("AVX2 not available; equivalence test skipped");
      return;
    }
    const auto& simd = k::table(k::Backend::Avx2);
    const auto& ref = k::table(k::Backend::Scalar);
    Rng rng(11);
    for (int t = 0; t < 300; ++t) {
      const Csr c = random_csr(rng, random_index(rng, 1, 37), random_index(rng, 1, 17));
      std::vector<double> x(c.cols), bias(c.rows), a(c.rows), b(c.rows);
      for (auto& v : x) v = random_vector(rng, 1, -5, 5)[0];
      for (auto& v : bias) v = random_vector(rng, 1, -5, 5)[0];
      for (bool act : {false, true}) {
        ref.affine(c.view(), x, bias, a, act);
        simd.affine(c.view(), x, bias, b, act);
        REQUIRE(bit_equal(a, b));
      }
    }
  }

  TEST_CASE("avx2 dot and gemv agree with scalar to rounding") {
    if (!k::avx2_available()) return;
    const auto& simd = k::table(k::Backend::Avx2);
    const auto& ref = k::table(k::Backend::Scalar);
    Rng rng(5);
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 9u, 31u, 64u, 1001u}) {
      const Vector a = random_vector(rng, n), b = random_vector(rng, n);
      const std::span<const double> sa(a.data(), n), sb(b.data(), n);
      const double want = ref.dot(sa, sb);
      CHECK(std::abs(simd.dot(sa, sb) - want) <= 1e-13 * (a.norm() * b.norm()));
      const std::size_t rows = n % 7 + 1;
      const Matrix m = random_matrix(rng, rows, n);
      const Eigen::Matrix<double, -1, -1, Eigen::RowMajor> mr = m;
      Vector y1(rows), y2(rows);
      ref.gemv({mr.data(), rows * n}, rows, n, sa, {y1.data(), rows});
      simd.gemv({mr.data(), rows * n}, rows, n, sa, {y2.data(), rows});
      CHECK((y1 - y2).norm() <= 1e-13 * m.norm() * a.norm());
    }
  }

  TEST_CASE("realize is identical under both backends") {
    if (!k::avx2_available()) return;
    Rng rng(9);
    const Network net = inversion_network_for_length(3, 3);
    const Vector x = vec(random_contraction(rng, 3, 0.3));
    k::set_backend(k::Backend::Scalar);
    const Vector a = realize(net, x);
    k::set_backend(k::Backend::Avx2);
    const Vector b = realize(net, x);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
  }

  TEST_CASE("dispatch reports backends") {
    CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
    CHECK(k::backend_name(k::Backend::Avx2) == "avx2");
    CHECK(k::table(k::Backend::Scalar).backend == k::Backend::Scalar);
    k::set_backend(k::Backend::Scalar);
    CHECK(k::active().backend == k::Backend::Scalar);
    if (k::avx2_available()) k::set_backend(k::Backend::Avx2);
  }
}
