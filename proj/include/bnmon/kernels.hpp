#pragma once

// Dense double-precision kernels used by the table algebra.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2 variant is compiled into a separate translation unit and selected at
// first use when the CPU reports AVX2+FMA; on AArch64 a NEON variant is used.
// Reductions (sum, dot) may reassociate in the vector variants, so results
// can differ from the scalar path in the last few ulps. Elementwise kernels
// are bit-identical across variants.

#include <cstddef>
#include <cstdint>
#include <span>

namespace bnmon::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

// Currently selected variant. Initialised from CPU detection; the
// environment variable BNMON_SIMD=scalar forces the reference path.
Isa active_isa();

// Switch variant at runtime. Throws bnmon::Error when unsupported.
void set_isa(Isa isa);

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double factor);

// dst[i] *= src[index[i]]
void multiply_gather(std::span<double> dst, std::span<const double> src,
                     std::span<const std::uint32_t> index);

// out[i] = den[i] == 0 ? 0 : num[i] / den[i]
void divide_safe(std::span<double> out, std::span<const double> num,
                 std::span<const double> den);

// Raw entry points per variant, exposed for equivalence testing.
struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);
  void (*multiply_gather)(double* dst, const double* src, const std::uint32_t* index,
                          std::size_t n);
  void (*divide_safe)(double* out, const double* num, const double* den, std::size_t n);
};

const KernelTable& table_for(Isa isa);

namespace scalar {
const KernelTable& table();
}

#if defined(BNMON_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

#if defined(BNMON_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

}  // namespace bnmon::kernels
