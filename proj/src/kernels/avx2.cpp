#include <immintrin.h>

#include <algorithm>

#include "requ/kernels.hpp"

namespace requ::kernels::avx2 {

namespace {

double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

// Four rows per step, one row per lane. Lane i walks row r+i front to back,
// so every output sees the same sequence of roundings as the scalar kernel.
// Lanes whose row is exhausted gather +0 and add +0 to an accumulator that
// can never be -0, which leaves it unchanged.
void affine(const CsrView& a, std::span<const double> x,
            std::span<const double> bias, std::span<double> out,
            bool activate) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256i even_lanes = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
  const int* rp = a.row_ptr.data();

  std::size_t r = 0;
  for (; r + 4 <= a.rows; r += 4) {
    const __m256i start = _mm256_setr_epi64x(rp[r], rp[r + 1], rp[r + 2], rp[r + 3]);
    const __m256i stop = _mm256_setr_epi64x(rp[r + 1], rp[r + 2], rp[r + 3], rp[r + 4]);
    const __m256i len = _mm256_sub_epi64(stop, start);
    const int max_len = std::max(std::max(rp[r + 1] - rp[r], rp[r + 2] - rp[r + 1]),
                                 std::max(rp[r + 3] - rp[r + 2], rp[r + 4] - rp[r + 3]));

    __m256d acc = zero;
    for (int t = 0; t < max_len; ++t) {
      const __m256i step = _mm256_set1_epi64x(t);
      const __m256i live = _mm256_cmpgt_epi64(len, step);
      const __m256i pos = _mm256_and_si256(_mm256_add_epi64(start, step), live);
      const __m128i live32 =
          _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(live, even_lanes));

      const __m256d w = _mm256_mask_i64gather_pd(zero, a.values.data(), pos,
                                                 _mm256_castsi256_pd(live), 8);
      const __m128i col = _mm256_mask_i64gather_epi32(
          _mm_setzero_si128(), a.col_idx.data(), pos, live32, 4);
      const __m256d xv = _mm256_mask_i64gather_pd(
          zero, x.data(), _mm256_cvtepi32_epi64(col), _mm256_castsi256_pd(live), 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, xv));
    }

    __m256d z = _mm256_add_pd(acc, _mm256_loadu_pd(bias.data() + r));
    if (activate) {
      // max_pd returns the second operand for NaN input, matching `z > 0 ? z : 0`.
      const __m256d t = _mm256_max_pd(z, zero);
      z = _mm256_mul_pd(t, t);
    }
    _mm256_storeu_pd(out.data() + r, z);
  }

  for (; r < a.rows; ++r) {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    const double z = s + bias[r];
    out[r] = activate ? requ(z) : z;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                             _mm256_loadu_pd(b.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4),
                                             _mm256_loadu_pd(b.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                             _mm256_loadu_pd(b.data() + i)));
  }
  double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(a.subspan(r * cols, cols), x);
  }
}

}  // namespace requ::kernels::avx2
