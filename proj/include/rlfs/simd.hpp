#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops shared by the decision network (dense
// matrix-vector products) and the classifiers/rankers (bitset popcounts).
//
// Every kernel has a scalar reference implementation. Vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64) are selected once at startup from
// CPU feature detection; RLFS_SIMD=scalar|avx2|neon overrides the choice.
// Integer kernels are bit-identical across variants. Floating-point
// reductions differ only in summation order.
namespace rlfs::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  std::uint64_t (*popcount)(const std::uint64_t* a, std::size_t n);
  std::uint64_t (*popcount_and)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
  std::uint64_t (*popcount_and3)(const std::uint64_t* a, const std::uint64_t* b,
                                 const std::uint64_t* c, std::size_t n);
  std::uint64_t (*hamming)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
};

std::string_view isa_name(Isa isa);

// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

const KernelTable& kernels_for(Isa isa);
const KernelTable& active();

// Forces a variant for the rest of the process. Throws ArgumentError when
// the variant is unavailable.
void set_active(Isa isa);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(RLFS_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(RLFS_HAVE_NEON)
namespace neon {
extern const KernelTable kTable;
}
#endif

// Span-level helpers routed through the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

// y = W x (+ y when accumulate), W row-major rows x cols.
void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate = false);

// y += W^T v, W row-major rows x cols.
void gemv_transposed_acc(std::span<const double> w, std::size_t rows, std::size_t cols,
                         std::span<const double> v, std::span<double> y);

// G += u v^T, G row-major u.size() x v.size().
void outer_acc(std::span<const double> u, std::span<const double> v, std::span<double> g);

inline std::uint64_t popcount(std::span<const std::uint64_t> a) {
  return active().popcount(a.data(), a.size());
}

inline std::uint64_t popcount_and(std::span<const std::uint64_t> a,
                                  std::span<const std::uint64_t> b) {
  return active().popcount_and(a.data(), b.data(), a.size());
}

inline std::uint64_t popcount_and3(std::span<const std::uint64_t> a,
                                   std::span<const std::uint64_t> b,
                                   std::span<const std::uint64_t> c) {
  return active().popcount_and3(a.data(), b.data(), c.data(), a.size());
}

inline std::uint64_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return active().hamming(a.data(), b.data(), a.size());
}

}  // namespace rlfs::simd
