#include "bnmon/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "bnmon/error.hpp"

namespace bnmon::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("BNMON_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::kScalar;
  }
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&table_for(detect())};
  return table;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const KernelTable& current() { return *active_table().load(std::memory_order_relaxed); }

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(BNMON_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(BNMON_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(BNMON_HAVE_AVX2)
    case Isa::kAvx2: return avx2::table();
#endif
#if defined(BNMON_HAVE_NEON)
    case Isa::kNeon: return neon::table();
#endif
    default: return scalar::table();
  }
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw Error(std::string("kernel variant not supported on this CPU: ") + isa_name(isa));
  active_table().store(&table_for(isa), std::memory_order_relaxed);
  active().store(isa, std::memory_order_relaxed);
}

double sum(std::span<const double> x) { return current().sum(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  return current().dot(a.data(), b.data(), a.size());
}

void scale(std::span<double> x, double factor) { current().scale(x.data(), x.size(), factor); }

void multiply_gather(std::span<double> dst, std::span<const double> src,
                     std::span<const std::uint32_t> index) {
  current().multiply_gather(dst.data(), src.data(), index.data(), dst.size());
}

void divide_safe(std::span<double> out, std::span<const double> num, std::span<const double> den) {
  current().divide_safe(out.data(), num.data(), den.data(), out.size());
}

}  // namespace bnmon::kernels
