// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// the CPU has been checked for both features.
#include <immintrin.h>

#include <bit>

#include "rlfs/simd.hpp"

namespace rlfs::simd::avx2 {
namespace {

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

// Separate multiply and add (no FMA) so results match the scalar kernel bit
// for bit.
void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Nibble lookup popcount over 256-bit lanes, reduced with SAD.
inline __m256i PopcountBytes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

inline std::uint64_t HorizontalSum(__m256i acc) {
  return static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 0)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 1)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 2)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 3));
}

template <typename Combine, typename Tail>
std::uint64_t PopcountLoop(std::size_t n, Combine combine, Tail tail) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i counts = PopcountBytes(combine(i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(counts, _mm256_setzero_si256()));
  }
  std::uint64_t total = HorizontalSum(acc);
  for (; i < n; ++i) total += tail(i);
  return total;
}

inline __m256i Load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

std::uint64_t Popcount(const std::uint64_t* a, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return Load(a + i); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i])); });
}

std::uint64_t PopcountAnd(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return _mm256_and_si256(Load(a + i), Load(b + i)); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i] & b[i])); });
}

std::uint64_t PopcountAnd3(const std::uint64_t* a, const std::uint64_t* b,
                           const std::uint64_t* c, std::size_t n) {
  return PopcountLoop(
      n,
      [&](std::size_t i) {
        return _mm256_and_si256(_mm256_and_si256(Load(a + i), Load(b + i)), Load(c + i));
      },
      [&](std::size_t i) {
        return static_cast<std::uint64_t>(std::popcount(a[i] & b[i] & c[i]));
      });
}

std::uint64_t Hamming(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return _mm256_xor_si256(Load(a + i), Load(b + i)); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i] ^ b[i])); });
}

}  // namespace

const KernelTable kTable{Isa::Avx2, Dot, Axpy, Popcount, PopcountAnd, PopcountAnd3, Hamming};

}  // namespace rlfs::simd::avx2
