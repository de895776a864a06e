#pragma once

// Inner loops of the forward pass and of the dense oracles.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2
// variant is compiled separately and picked at runtime when the CPU supports
// it. The sparse affine kernel vectorizes across rows, so each output keeps
// the scalar accumulation order and both variants agree bit for bit. The
// dense dot/gemv kernels use split accumulators and agree only to rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace requ::kernels {

enum class Backend { Scalar, Avx2 };

/// Read-only view of a compressed-row sparse matrix.
struct CsrView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const int> row_ptr;  // rows + 1 entries
  std::span<const int> col_idx;
  std::span<const double> values;
};

/// out = A x + bias, followed by max(0, .)^2 when `activate` is set.
using AffineFn = void (*)(const CsrView& a, std::span<const double> x,
                          std::span<const double> bias, std::span<double> out,
                          bool activate);
/// Dense inner product.
using DotFn = double (*)(std::span<const double> a, std::span<const double> b);
/// y = A x for a dense row-major `rows` x `cols` matrix.
using GemvFn = void (*)(std::span<const double> a, std::size_t rows,
                        std::size_t cols, std::span<const double> x,
                        std::span<double> y);

struct KernelTable {
  Backend backend;
  AffineFn affine;
  DotFn dot;
  GemvFn gemv;
};

namespace scalar {
void affine(const CsrView& a, std::span<const double> x,
            std::span<const double> bias, std::span<double> out,
            bool activate);
double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(REQU_HAVE_AVX2)
namespace avx2 {
void affine(const CsrView& a, std::span<const double> x,
            std::span<const double> bias, std::span<double> out,
            bool activate);
double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
}  // namespace avx2
#endif

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// Kernels for a specific backend. Throws InvalidArgument if unavailable.
const KernelTable& table(Backend backend);

/// Kernels currently used by the library (best available by default).
const KernelTable& active();

/// Overrides the active backend. Not synchronized; call before evaluating.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend);

/// ReQU activation, max(0, z)^2.
inline double requ(double z) {
  const double t = z > 0.0 ? z : 0.0;
  return t * t;
}

}  // namespace requ::kernels
