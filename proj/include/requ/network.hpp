#pragma once

// Explicit ReQU networks: a sequence of affine layers ((A_1, b_1), ...,
// (A_L, b_L)) evaluated with sigma(z) = max(0, z)^2 after every layer except
// the last one.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace requ {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// One affine map z = A x + b. Weights never store exact zeros.
class Layer {
 public:
  Layer(SparseMatrix weights, Vector bias);
  Layer(const Matrix& weights, Vector bias);

  const SparseMatrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  std::size_t rows() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(weights_.cols()); }

  /// ||A||_0 + ||b||_0.
  std::size_t nonzeros() const;

 private:
  SparseMatrix weights_;
  Vector bias_;
};

struct ComplexityReport {
  std::size_t depth = 0;
  std::size_t nodes = 0;
  std::size_t total_nnz = 0;
  std::vector<std::size_t> layer_nnz;
};

using LayerPtr = std::shared_ptr<const Layer>;

/// Immutable, validated layer sequence. Layers are shared between networks
/// built from one another, so copies and compositions do not duplicate
/// untouched weights.
class Network {
 public:
  /// Throws EmptyNetwork, DimensionMismatch or NonFiniteEntry.
  explicit Network(std::vector<Layer> layers);
  explicit Network(std::vector<LayerPtr> layers);

  std::size_t depth() const { return layers_.size(); }
  std::size_t input_dim() const { return layers_.front()->cols(); }
  std::size_t output_dim() const { return layers_.back()->rows(); }
  const Layer& layer(std::size_t k) const { return *layers_.at(k); }
  const LayerPtr& shared_layer(std::size_t k) const { return layers_.at(k); }

 private:
  void validate() const;

  std::vector<LayerPtr> layers_;
};

/// Builds a network from dense (A_k, b_k) pairs.
Network make_network(const std::vector<std::pair<Matrix, Vector>>& layers);

/// Forward pass through the active kernel backend.
Vector realize(const Network& net, std::span<const double> x);
Vector realize(const Network& net, const Vector& x);

/// Evaluates every column of `inputs`; columns are independent.
Matrix realize_batch(const Network& net, const Matrix& inputs);

ComplexityReport complexity(const Network& net);

}  // namespace requ
