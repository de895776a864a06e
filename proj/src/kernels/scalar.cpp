#include "requ/kernels.hpp"

namespace requ::kernels::scalar {

void affine(const CsrView& a, std::span<const double> x,
            std::span<const double> bias, std::span<double> out,
            bool activate) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      acc += a.values[k] * x[a.col_idx[k]];
    }
    const double z = acc + bias[r];
    out[r] = activate ? requ(z) : z;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(a.subspan(r * cols, cols), x);
  }
}

}  // namespace requ::kernels::scalar
