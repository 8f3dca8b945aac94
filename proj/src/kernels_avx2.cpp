// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include "bnmon/kernels.hpp"

namespace bnmon::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  if (i + 4 <= n) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

void multiply_gather(double* dst, const double* src, const std::uint32_t* index, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + i));
    const __m256d g = _mm256_i32gather_pd(src, idx, 8);
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), g));
  }
  for (; i < n; ++i) dst[i] *= src[index[i]];
}

void divide_safe(double* out, const double* num, const double* den, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(den + i);
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(num + i), d);
    const __m256d nonzero = _mm256_cmp_pd(d, zero, _CMP_NEQ_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(q, nonzero));
  }
  for (; i < n; ++i) out[i] = den[i] == 0.0 ? 0.0 : num[i] / den[i];
}

constexpr KernelTable kTable{&sum, &dot, &scale, &multiply_gather, &divide_safe};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace bnmon::kernels::avx2
