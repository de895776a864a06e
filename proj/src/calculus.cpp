#include "requ/calculus.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "requ/errors.hpp"

namespace requ {

namespace {

// Scalar gadget of the identity: x = beta^T s(omega x + gamma).
constexpr std::array<double, 4> kOmega{1.0, -1.0, 1.0, -1.0};
constexpr std::array<double, 4> kGamma{1.0, -1.0, -1.0, 1.0};
constexpr std::array<double, 4> kBeta{0.25, 0.25, -0.25, -0.25};

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols,
                           const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

}  // namespace

Network affine_network(const Matrix& a, const Vector& b) {
  return Network({Layer(a, b)});
}

Network affine_network(SparseMatrix a, Vector b) {
  return Network({Layer(std::move(a), std::move(b))});
}

Network fan_out(std::size_t n, std::size_t copies) {
  if (n == 0 || copies == 0) throw InvalidArgument("fan_out needs n, copies >= 1");
  std::vector<Triplet> t;
  t.reserve(n * copies);
  for (std::size_t c = 0; c < copies; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      t.emplace_back(static_cast<int>(c * n + i), static_cast<int>(i), 1.0);
    }
  }
  const auto rows = static_cast<Eigen::Index>(n * copies);
  return affine_network(from_triplets(rows, static_cast<Eigen::Index>(n), t),
                        Vector::Zero(rows));
}

Network concat(const Network& phi1, const Network& phi2) {
  if (phi1.input_dim() != phi2.output_dim()) {
    throw DimensionMismatch("concat: inner network emits " +
                            std::to_string(phi2.output_dim()) +
                            " values, outer network expects " +
                            std::to_string(phi1.input_dim()));
  }
  std::vector<LayerPtr> layers;
  layers.reserve(phi1.depth() + phi2.depth() - 1);
  for (std::size_t k = 0; k + 1 < phi2.depth(); ++k) layers.push_back(phi2.shared_layer(k));

  const Layer& inner = phi2.layer(phi2.depth() - 1);
  const Layer& outer = phi1.layer(0);
  SparseMatrix fused = outer.weights() * inner.weights();
  Vector fused_bias = outer.weights() * inner.bias() + outer.bias();
  layers.push_back(std::make_shared<const Layer>(std::move(fused), std::move(fused_bias)));

  for (std::size_t k = 1; k < phi1.depth(); ++k) layers.push_back(phi1.shared_layer(k));
  return Network(std::move(layers));
}

Network identity_network(std::size_t n, std::size_t depth) {
  if (n < 1 || depth < 1) throw InvalidArgument("identity_network needs n >= 1 and L >= 1");
  const auto rows = static_cast<Eigen::Index>(4 * n);
  const auto cols = static_cast<Eigen::Index>(n);
  if (depth == 1) return affine_network(sparse_identity(cols), Vector::Zero(cols));

  std::vector<Triplet> w, b, wb;
  Vector gamma(rows);
  for (std::size_t i = 0; i < n; ++i) {
    const auto block = static_cast<int>(4 * i);
    for (int a = 0; a < 4; ++a) {
      w.emplace_back(block + a, static_cast<int>(i), kOmega[a]);
      b.emplace_back(static_cast<int>(i), block + a, kBeta[a]);
      gamma[block + a] = kGamma[a];
      for (int c = 0; c < 4; ++c) wb.emplace_back(block + a, block + c, kOmega[a] * kBeta[c]);
    }
  }
  std::vector<LayerPtr> layers;
  layers.reserve(depth);
  layers.push_back(std::make_shared<const Layer>(from_triplets(rows, cols, w), gamma));
  if (depth > 2) {
    // The hidden layers are identical, so one instance is shared.
    const auto hidden = std::make_shared<const Layer>(from_triplets(rows, rows, wb), gamma);
    for (std::size_t k = 0; k + 2 < depth; ++k) layers.push_back(hidden);
  }
  layers.push_back(std::make_shared<const Layer>(from_triplets(cols, rows, b), Vector::Zero(cols)));
  return Network(std::move(layers));
}

Network sparse_concat(const Network& phi1, const Network& phi2) {
  if (phi1.input_dim() != phi2.output_dim()) {
    throw DimensionMismatch("sparse_concat: inner network emits " +
                            std::to_string(phi2.output_dim()) +
                            " values, outer network expects " +
                            std::to_string(phi1.input_dim()));
  }
  return concat(phi1, concat(identity_network(phi2.output_dim(), 2), phi2));
}

Network extend(const Network& phi, std::size_t depth) {
  if (depth < phi.depth()) {
    throw InvalidArgument("extend: target depth " + std::to_string(depth) +
                          " is below the network depth " + std::to_string(phi.depth()));
  }
  if (depth == phi.depth()) return phi;
  return sparse_concat(identity_network(phi.output_dim(), depth - phi.depth()), phi);
}

Network parallelize(std::span<const Network> phis) {
  if (phis.empty()) throw EmptyList("parallelize needs at least one network");
  std::size_t depth = 0;
  for (const Network& phi : phis) depth = std::max(depth, phi.depth());

  if (phis.size() == 1) return extend(phis.front(), depth);

  std::vector<Network> lanes;
  lanes.reserve(phis.size());
  for (const Network& phi : phis) lanes.push_back(extend(phi, depth));

  std::vector<Layer> layers;
  layers.reserve(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    Eigen::Index rows = 0, cols = 0;
    std::size_t nnz = 0;
    for (const Network& lane : lanes) {
      rows += static_cast<Eigen::Index>(lane.layer(k).rows());
      cols += static_cast<Eigen::Index>(lane.layer(k).cols());
      nnz += static_cast<std::size_t>(lane.layer(k).weights().nonZeros());
    }
    std::vector<Triplet> t;
    t.reserve(nnz);
    Vector bias(rows);
    Eigen::Index row_off = 0, col_off = 0;
    for (const Network& lane : lanes) {
      const Layer& layer = lane.layer(k);
      const SparseMatrix& a = layer.weights();
      for (int r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
          t.emplace_back(static_cast<int>(row_off + it.row()),
                         static_cast<int>(col_off + it.col()), it.value());
        }
      }
      bias.segment(row_off, a.rows()) = layer.bias();
      row_off += a.rows();
      col_off += a.cols();
    }
    layers.emplace_back(from_triplets(rows, cols, t), std::move(bias));
  }
  return Network(std::move(layers));
}

Network parallelize(std::initializer_list<Network> phis) {
  return parallelize(std::span<const Network>(phis.begin(), phis.size()));
}

}  // namespace requ
