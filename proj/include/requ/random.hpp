#pragma once

// Seeded generators for test matrices and networks.

#include <cstdint>
#include <random>
#include <vector>

#include "requ/network.hpp"

namespace requ {

using Rng = std::mt19937_64;

/// Entries i.i.d. uniform on [lo, hi].
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                     double hi = 1.0);
Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0);

/// Uniform [-1, 1] entries rescaled so that ||A||_2 = 1 - delta.
Matrix random_contraction(Rng& rng, std::size_t d, double delta);

/// Dense random network with the given widths (widths[0] is the input
/// dimension) and weights uniform on [-scale, scale]. About a quarter of
/// the entries are set to zero so that sparsity bookkeeping is exercised.
Network random_network(Rng& rng, const std::vector<std::size_t>& widths, double scale = 0.5);

/// widths of length depth + 1 with entries in [1, max_width].
std::vector<std::size_t> random_widths(Rng& rng, std::size_t depth, std::size_t max_width);

std::size_t random_index(Rng& rng, std::size_t lo, std::size_t hi);

}  // namespace requ
