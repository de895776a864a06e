#include "requ/errors.hpp"
#include "requ/kernels.hpp"

namespace requ::kernels {

namespace {

constexpr KernelTable kScalar{Backend::Scalar, &scalar::affine, &scalar::dot,
                              &scalar::gemv};
#if defined(REQU_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2, &avx2::affine, &avx2::dot,
                            &avx2::gemv};
#endif

const KernelTable* best_available() {
#if defined(REQU_HAVE_AVX2)
  if (avx2_available()) return &kAvx2;
#endif
  return &kScalar;
}

const KernelTable*& current() {
  static const KernelTable* table = best_available();
  return table;
}

}  // namespace

bool avx2_available() {
#if defined(REQU_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

const KernelTable& table(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return kScalar;
    case Backend::Avx2:
#if defined(REQU_HAVE_AVX2)
      if (avx2_available()) return kAvx2;
#endif
      throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
  throw InvalidArgument("unknown kernel backend");
}

const KernelTable& active() { return *current(); }

void set_backend(Backend backend) { current() = &table(backend); }

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace requ::kernels
