#include "requ/random.hpp"

#include "requ/matrix_nets.hpp"

namespace requ {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Filled column by column so the draw order is independent of Eigen internals.
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  return m;
}

Vector random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  return random_matrix(rng, n, 1, lo, hi).col(0);
}

Matrix random_contraction(Rng& rng, std::size_t d, double delta) {
  Matrix a = random_matrix(rng, d, d);
  return a * ((1.0 - delta) / spectral_norm(a));
}

Network random_network(Rng& rng, const std::vector<std::size_t>& widths, double scale) {
  std::bernoulli_distribution keep(0.75);
  std::vector<std::pair<Matrix, Vector>> layers;
  for (std::size_t k = 1; k < widths.size(); ++k) {
    Matrix a = random_matrix(rng, widths[k], widths[k - 1], -scale, scale);
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      for (Eigen::Index r = 0; r < a.rows(); ++r)
        if (!keep(rng)) a(r, c) = 0.0;
    Vector b = random_vector(rng, widths[k], -scale, scale);
    for (auto& v : b)
      if (!keep(rng)) v = 0.0;
    layers.emplace_back(std::move(a), std::move(b));
  }
  return make_network(layers);
}

std::size_t random_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<std::size_t> random_widths(Rng& rng, std::size_t depth, std::size_t max_width) {
  std::vector<std::size_t> w(depth + 1);
  for (auto& v : w) v = random_index(rng, 1, max_width);
  return w;
}

}  // namespace requ
