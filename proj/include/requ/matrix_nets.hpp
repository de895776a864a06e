#pragma once

// Networks for matrix arithmetic. Matrices enter and leave networks in
// column-major flattened form, vec(A) = (A_11, ..., A_d1, A_12, ...).

#include <cstddef>

#include "requ/network.hpp"

namespace requ {

Vector vec(const Matrix& a);
Matrix matr(const Vector& v, std::size_t rows, std::size_t cols);

/// Exact (x, y) -> x y through one hidden layer of width 4.
Network scalar_product_network();

/// (vec A, vec B) -> vec(A B) for A d x n and B n x l. Depth 2,
/// 8dnl weights in the first layer and 4dnl in the second.
Network mult_network(std::size_t d, std::size_t n, std::size_t l);

/// vec A -> vec(A^2) for d x d matrices.
Network square_network(std::size_t d);

/// vec A -> vec(A^(2^j)), depth 2j.
Network power_network(std::size_t d, std::size_t j);

struct NeumannPlan {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t l = 0;
};

/// l = ceil(log2(log_{1-delta}(delta epsilon) + 1)), raised if rounding in
/// the closed form would leave (1-delta)^(2^l) / delta above epsilon.
NeumannPlan neumann_length(double epsilon, double delta);

/// (1-delta)^(2^l) / delta.
double neumann_tail(double delta, std::size_t l);

/// vec A -> vec(sum_{k < 2^l} A^k) with l = neumann_length(epsilon, delta).l,
/// which is within epsilon of (I - A)^-1 whenever ||A||_2 <= 1 - delta.
/// Depth 2l + 1.
Network inversion_network(std::size_t d, double epsilon, double delta);

/// Same construction for an explicit number of factors l >= 1.
Network inversion_network_for_length(std::size_t d, std::size_t l);

/// sum_{k < 2^l} A^k by direct accumulation of powers.
Matrix neumann_partial_sum_oracle(const Matrix& a, std::size_t l);

/// prod_{i < l} (A^(2^i) + I), the factorisation the network encodes.
Matrix neumann_product_form(const Matrix& a, std::size_t l);

/// Weight bound from the construction:
/// (32 l^2 + 60 l - 80) d^3 + (40 l^2 - 44 l - 112) d^2.
/// Only meaningful for l >= 2.
double inversion_nnz_bound(std::size_t d, std::size_t l);

/// Largest singular value by power iteration on A^T A.
double spectral_norm(const Matrix& a);

}  // namespace requ
