#include "requ/network.hpp"

#include <cmath>
#include <string>

#include "requ/errors.hpp"
#include "requ/kernels.hpp"

namespace requ {

namespace {

void require_finite(const SparseMatrix& a, const Vector& b) {
  for (int i = 0; i < a.nonZeros(); ++i) {
    if (!std::isfinite(a.valuePtr()[i])) {
      throw NonFiniteEntry("weight matrix holds a non-finite entry");
    }
  }
  if (!b.allFinite()) throw NonFiniteEntry("bias vector holds a non-finite entry");
}

SparseMatrix drop_exact_zeros(SparseMatrix a) {
  a.prune([](int, int, double v) { return v != 0.0; });
  a.makeCompressed();
  return a;
}

kernels::CsrView view_of(const SparseMatrix& a) {
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto nnz = static_cast<std::size_t>(a.nonZeros());
  return {rows, static_cast<std::size_t>(a.cols()),
          std::span<const int>(a.outerIndexPtr(), rows + 1),
          std::span<const int>(a.innerIndexPtr(), nnz),
          std::span<const double>(a.valuePtr(), nnz)};
}

}  // namespace

Layer::Layer(SparseMatrix weights, Vector bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw DimensionMismatch("layer with a zero dimension");
  }
  if (bias_.size() != weights_.rows()) {
    throw DimensionMismatch("bias length " + std::to_string(bias_.size()) +
                            " does not match " + std::to_string(weights_.rows()) +
                            " weight rows");
  }
  require_finite(weights_, bias_);
  weights_ = drop_exact_zeros(std::move(weights_));
}

Layer::Layer(const Matrix& weights, Vector bias)
    : Layer(SparseMatrix(weights.sparseView(0.0, 0.0)), std::move(bias)) {
  if (!weights.allFinite()) throw NonFiniteEntry("weight matrix holds a non-finite entry");
}

std::size_t Layer::nonzeros() const {
  return static_cast<std::size_t>(weights_.nonZeros()) +
         static_cast<std::size_t>((bias_.array() != 0.0).count());
}

Network::Network(std::vector<Layer> layers) {
  layers_.reserve(layers.size());
  for (Layer& layer : layers) layers_.push_back(std::make_shared<const Layer>(std::move(layer)));
  validate();
}

Network::Network(std::vector<LayerPtr> layers) : layers_(std::move(layers)) { validate(); }

void Network::validate() const {
  if (layers_.empty()) throw EmptyNetwork();
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (!layers_[k]) throw InvalidArgument("null layer");
    if (k > 0 && layers_[k]->cols() != layers_[k - 1]->rows()) {
      throw DimensionMismatch("layer " + std::to_string(k + 1) + " expects " +
                              std::to_string(layers_[k]->cols()) +
                              " inputs but layer " + std::to_string(k) +
                              " emits " + std::to_string(layers_[k - 1]->rows()));
    }
  }
}

Network make_network(const std::vector<std::pair<Matrix, Vector>>& layers) {
  std::vector<Layer> built;
  built.reserve(layers.size());
  for (const auto& [a, b] : layers) built.emplace_back(a, b);
  return Network(std::move(built));
}

Vector realize(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw DimensionMismatch("input has length " + std::to_string(x.size()) +
                            ", network expects " + std::to_string(net.input_dim()));
  }
  const auto& k = kernels::active();
  Vector current = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  Vector next;
  const std::size_t last = net.depth() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const Layer& layer = net.layer(i);
    next.resize(static_cast<Eigen::Index>(layer.rows()));
    k.affine(view_of(layer.weights()),
             std::span<const double>(current.data(), layer.cols()),
             std::span<const double>(layer.bias().data(), layer.rows()),
             std::span<double>(next.data(), layer.rows()), i != last);
    std::swap(current, next);
  }
  return current;
}

Vector realize(const Network& net, const Vector& x) {
  return realize(net, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Matrix realize_batch(const Network& net, const Matrix& inputs) {
  Matrix out(static_cast<Eigen::Index>(net.output_dim()), inputs.cols());
  for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
    const Vector column = inputs.col(c);
    out.col(c) = realize(net, column);
  }
  return out;
}

ComplexityReport complexity(const Network& net) {
  ComplexityReport report;
  report.depth = net.depth();
  report.nodes = net.input_dim();
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& layer = net.layer(k);
    report.nodes += layer.rows();
    report.layer_nnz.push_back(layer.nonzeros());
    report.total_nnz += layer.nonzeros();
  }
  return report;
}

}  // namespace requ
