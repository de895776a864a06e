#pragma once

// Structural operations on ReQU networks. Every constructor is pure: inputs
// are left untouched and the result is a fresh immutable Network.

#include <span>
#include <vector>

#include "requ/network.hpp"

namespace requ {

/// Single-layer network x -> A x + b.
Network affine_network(const Matrix& a, const Vector& b);
Network affine_network(SparseMatrix a, Vector b);

/// ((Id; ...; Id), 0): repeats an n-vector `copies` times.
Network fan_out(std::size_t n, std::size_t copies);

/// phi1 . phi2: runs phi2 first, fusing its last affine map into the first
/// layer of phi1. Depth L1 + L2 - 1.
Network concat(const Network& phi1, const Network& phi2);

/// Network of depth L realizing the identity on R^n for every input.
///
/// L = 1 is ((Id, 0)). For L >= 2 the layers are (W, G), (W B, G) repeated
/// L - 2 times, then (B, 0), built from the scalar gadget
/// x = 1/4 [s(x + 1) + s(-x - 1) - s(x - 1) - s(-x + 1)] with s = max(0,.)^2.
/// Nonzero weights: n for L = 1 and 20 n L - 28 n otherwise.
Network identity_network(std::size_t n, std::size_t depth);

/// phi1 . Id_{n,2} . phi2. Depth L1 + L2, weight growth bounded by the
/// first layer of phi1 and the last layer of phi2.
Network sparse_concat(const Network& phi1, const Network& phi2);

/// Pads `phi` to exactly `depth` layers with an identity network in front of
/// its output. Returns phi unchanged when the depths already agree.
Network extend(const Network& phi, std::size_t depth);

/// Block-diagonal stacking after padding every lane to the largest depth.
/// The result consumes the concatenation of the lane inputs.
Network parallelize(std::span<const Network> phis);
Network parallelize(std::initializer_list<Network> phis);

}  // namespace requ
