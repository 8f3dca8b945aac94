#include <arm_neon.h>

#include "bnmon/kernels.hpp"

namespace bnmon::kernels::neon {
namespace {

double sum(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale(double* x, std::size_t n, double factor) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), factor));
  for (; i < n; ++i) x[i] *= factor;
}

// No gather instruction; the scalar loop is as fast here.
void multiply_gather(double* dst, const double* src, const std::uint32_t* index, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] *= src[index[i]];
}

void divide_safe(double* out, const double* num, const double* den, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vld1q_f64(den + i);
    const float64x2_t q = vdivq_f64(vld1q_f64(num + i), d);
    const uint64x2_t zero = vceqzq_f64(d);
    vst1q_f64(out + i, vbslq_f64(zero, vdupq_n_f64(0.0), q));
  }
  for (; i < n; ++i) out[i] = den[i] == 0.0 ? 0.0 : num[i] / den[i];
}

constexpr KernelTable kTable{&sum, &dot, &scale, &multiply_gather, &divide_safe};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace bnmon::kernels::neon
