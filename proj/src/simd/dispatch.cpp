#include <atomic>
#include <cstdlib>
#include <string>

#include "rlfs/error.hpp"
#include "rlfs/simd.hpp"

namespace rlfs::simd {
namespace {

bool CpuSupports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(RLFS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(RLFS_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* Initial() {
  if (const char* forced = std::getenv("RLFS_SIMD")) {
    const std::string name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == isa_name(isa) && CpuSupports(isa)) return &kernels_for(isa);
    }
  }
  const auto isas = available_isas();
  return &kernels_for(isas.back());
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{Initial()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (CpuSupports(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  if (!CpuSupports(isa)) {
    throw ArgumentError("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  }
  switch (isa) {
#if defined(RLFS_HAVE_AVX2)
    case Isa::Avx2:
      return avx2::kTable;
#endif
#if defined(RLFS_HAVE_NEON)
    case Isa::Neon:
      return neon::kTable;
#endif
    default:
      return scalar::kTable;
  }
}

const KernelTable& active() { return *Slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { Slot().store(&kernels_for(isa), std::memory_order_relaxed); }

void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    const double v = k.dot(w.data() + r * cols, x.data(), cols);
    y[r] = accumulate ? y[r] + v : v;
  }
}

void gemv_transposed_acc(std::span<const double> w, std::size_t rows, std::size_t cols,
                         std::span<const double> v, std::span<double> y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (v[r] != 0.0) k.axpy(v[r], w.data() + r * cols, y.data(), cols);
  }
}

void outer_acc(std::span<const double> u, std::span<const double> v, std::span<double> g) {
  const auto& k = active();
  const std::size_t cols = v.size();
  for (std::size_t r = 0; r < u.size(); ++r) {
    if (u[r] != 0.0) k.axpy(u[r], v.data(), g.data() + r * cols, cols);
  }
}

}  // namespace rlfs::simd
