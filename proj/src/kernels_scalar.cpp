#include "bnmon/kernels.hpp"

namespace bnmon::kernels::scalar {
namespace {

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void multiply_gather(double* dst, const double* src, const std::uint32_t* index, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] *= src[index[i]];
}

void divide_safe(double* out, const double* num, const double* den, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = den[i] == 0.0 ? 0.0 : num[i] / den[i];
}

constexpr KernelTable kTable{&sum, &dot, &scale, &multiply_gather, &divide_safe};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace bnmon::kernels::scalar
