#include "requ/matrix_nets.hpp"

#include <array>
#include <cmath>
#include <string>

#include "requ/calculus.hpp"
#include "requ/errors.hpp"

namespace requ {

namespace {

constexpr std::array<double, 4> kOmega{1.0, -1.0, 1.0, -1.0};
constexpr std::array<double, 4> kGamma{1.0, -1.0, -1.0, 1.0};
constexpr std::array<double, 4> kBeta{0.25, 0.25, -0.25, -0.25};

void require_positive(std::size_t v, const char* what) {
  if (v == 0) throw InvalidArgument(std::string(what) + " must be at least 1");
}

void require_unit_open(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (0, 1), got " + std::to_string(v));
  }
}

}  // namespace

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix matr(const Vector& v, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) {
    throw DimensionMismatch("matr: vector of length " + std::to_string(v.size()) +
                            " cannot be shaped " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

Network scalar_product_network() {
  Matrix w1(4, 2);
  for (int a = 0; a < 4; ++a) {
    w1(a, 0) = kOmega[a];
    w1(a, 1) = kGamma[a];
  }
  Matrix w2(1, 4);
  for (int a = 0; a < 4; ++a) w2(0, a) = kBeta[a];
  return make_network({{w1, Vector::Zero(4)}, {w2, Vector::Zero(1)}});
}

Network mult_network(std::size_t d, std::size_t n, std::size_t l) {
  require_positive(d, "d");
  require_positive(n, "n");
  require_positive(l, "l");
  const std::size_t products = d * n * l;
  const std::size_t b_offset = d * n;

  // Hidden unit block (i, k, j) evaluates the scalar gadget on (A_ik, B_kj);
  // output (i, j) sums the n blocks sharing i and j.
  std::vector<Triplet> first, second;
  first.reserve(8 * products);
  second.reserve(4 * products);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t out = i + j * d;
      for (std::size_t k = 0; k < n; ++k) {
        const auto block = static_cast<int>(4 * (out * n + k));
        const auto col_a = static_cast<int>(i + k * d);
        const auto col_b = static_cast<int>(b_offset + k + j * n);
        for (int a = 0; a < 4; ++a) {
          first.emplace_back(block + a, col_a, kOmega[a]);
          first.emplace_back(block + a, col_b, kGamma[a]);
          second.emplace_back(static_cast<int>(out), block + a, kBeta[a]);
        }
      }
    }
  }
  const auto hidden = static_cast<Eigen::Index>(4 * products);
  SparseMatrix w1(hidden, static_cast<Eigen::Index>(n * (d + l)));
  w1.setFromTriplets(first.begin(), first.end());
  SparseMatrix w2(static_cast<Eigen::Index>(d * l), hidden);
  w2.setFromTriplets(second.begin(), second.end());

  std::vector<Layer> layers;
  layers.emplace_back(std::move(w1), Vector::Zero(hidden));
  layers.emplace_back(std::move(w2), Vector::Zero(static_cast<Eigen::Index>(d * l)));
  return Network(std::move(layers));
}

Network square_network(std::size_t d) {
  require_positive(d, "d");
  return concat(mult_network(d, d, d), fan_out(d * d, 2));
}

Network power_network(std::size_t d, std::size_t j) {
  require_positive(d, "d");
  require_positive(j, "j");
  const Network square = square_network(d);
  Network power = square;
  for (std::size_t i = 1; i < j; ++i) power = sparse_concat(square, power);
  return power;
}

double neumann_tail(double delta, std::size_t l) {
  return std::exp(std::ldexp(1.0, static_cast<int>(l)) * std::log1p(-delta)) / delta;
}

NeumannPlan neumann_length(double epsilon, double delta) {
  require_unit_open(epsilon, "epsilon");
  require_unit_open(delta, "delta");
  const double steps = std::log(delta * epsilon) / std::log1p(-delta);
  auto l = static_cast<std::size_t>(std::ceil(std::log2(steps + 1.0)));
  if (l == 0) l = 1;
  while (neumann_tail(delta, l) > epsilon) ++l;
  return {epsilon, delta, l};
}

Network inversion_network_for_length(std::size_t d, std::size_t l) {
  require_positive(d, "d");
  require_positive(l, "l");
  const std::size_t d2 = d * d;
  SparseMatrix id(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(d2));
  id.setIdentity();
  // Phi_1: A -> A + I.
  const Network plus_identity = affine_network(id, vec(Matrix::Identity(
                                                       static_cast<Eigen::Index>(d),
                                                       static_cast<Eigen::Index>(d))));

  Network pi = plus_identity;
  if (l >= 2) {
    const Network mult = mult_network(d, d, d);
    const Network square = square_network(d);
    Network power = square;
    for (std::size_t m = 2; m <= l; ++m) {
      if (m > 2) power = sparse_concat(square, power);
      pi = sparse_concat(mult, parallelize({pi, sparse_concat(plus_identity, power)}));
    }
  }
  Network inv = concat(pi, fan_out(d2, l));
  // pi_1 is a single affine layer; pad so the depth is 2l + 1 for every l.
  if (l == 1) inv = extend(inv, 3);
  return inv;
}

Network inversion_network(std::size_t d, double epsilon, double delta) {
  return inversion_network_for_length(d, neumann_length(epsilon, delta).l);
}

Matrix neumann_partial_sum_oracle(const Matrix& a, std::size_t l) {
  if (a.rows() != a.cols()) throw DimensionMismatch("Neumann sum needs a square matrix");
  require_positive(l, "l");
  const std::size_t terms = std::size_t{1} << l;
  Matrix sum = Matrix::Identity(a.rows(), a.cols());
  Matrix term = sum;
  for (std::size_t k = 1; k < terms; ++k) {
    term = term * a;
    sum += term;
  }
  return sum;
}

Matrix neumann_product_form(const Matrix& a, std::size_t l) {
  if (a.rows() != a.cols()) throw DimensionMismatch("Neumann product needs a square matrix");
  require_positive(l, "l");
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  Matrix prod = id;
  Matrix power = a;
  for (std::size_t i = 0; i < l; ++i) {
    prod = prod * (power + id);
    power = power * power;
  }
  return prod;
}

double inversion_nnz_bound(std::size_t d, std::size_t l) {
  const double dd = static_cast<double>(d);
  const double ll = static_cast<double>(l);
  return (32 * ll * ll + 60 * ll - 80) * dd * dd * dd + (40 * ll * ll - 44 * ll - 112) * dd * dd;
}

}  // namespace requ
