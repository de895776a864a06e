#include <cmath>

#include "requ/errors.hpp"
#include "requ/kernels.hpp"
#include "requ/matrix_nets.hpp"

namespace requ {

namespace {

constexpr double kTolerance = 1e-12;
constexpr std::size_t kMaxIterations = 100000;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

double spectral_norm(const Matrix& a) {
  if (!a.allFinite()) throw NonFiniteEntry("spectral_norm of a non-finite matrix");
  if (a.size() == 0) return 0.0;
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  const RowMatrix ar = a;
  // Column-major storage of A is row-major storage of A^T.
  const std::span<const double> a_rows(ar.data(), m * n);
  const std::span<const double> at_rows(a.data(), m * n);
  const auto& k = kernels::active();

  Vector x = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  Vector ax(static_cast<Eigen::Index>(m));
  Vector y(static_cast<Eigen::Index>(n));
  double previous = -1.0;
  int settled = 0;
  std::size_t restarts = 0;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    k.gemv(a_rows, m, n, {x.data(), n}, {ax.data(), m});
    k.gemv(at_rows, n, m, {ax.data(), m}, {y.data(), n});
    // Rayleigh quotient of A^T A at the unit vector x.
    const double rayleigh = ax.squaredNorm();
    const double norm = y.norm();
    if (norm == 0.0) {
      if (rayleigh == 0.0 && restarts >= n) return 0.0;
      // Start vector orthogonal to the dominant space: try the next basis vector.
      x.setZero();
      x[static_cast<Eigen::Index>(restarts % n)] = 1.0;
      ++restarts;
      previous = -1.0;
      settled = 0;
      continue;
    }
    if (previous >= 0.0 && std::abs(rayleigh - previous) <= kTolerance * rayleigh) {
      if (++settled == 2) return std::sqrt(rayleigh);
    } else {
      settled = 0;
    }
    previous = rayleigh;
    x = y / norm;
  }
  throw ConvergenceFailure("spectral_norm did not settle within 100000 iterations");
}

}  // namespace requ
