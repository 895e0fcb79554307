#include <arm_neon.h>

#include <bit>

#include "rlfs/simd.hpp"

namespace rlfs::simd::neon {
namespace {

double Dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

template <typename Combine, typename Tail>
std::uint64_t PopcountLoop(std::size_t n, Combine combine, Tail tail) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(combine(i)));
    acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(bytes))));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += tail(i);
  return total;
}

std::uint64_t Popcount(const std::uint64_t* a, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return vld1q_u64(a + i); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i])); });
}

std::uint64_t PopcountAnd(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i] & b[i])); });
}

std::uint64_t PopcountAnd3(const std::uint64_t* a, const std::uint64_t* b,
                           const std::uint64_t* c, std::size_t n) {
  return PopcountLoop(
      n,
      [&](std::size_t i) {
        return vandq_u64(vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)), vld1q_u64(c + i));
      },
      [&](std::size_t i) {
        return static_cast<std::uint64_t>(std::popcount(a[i] & b[i] & c[i]));
      });
}

std::uint64_t Hamming(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return PopcountLoop(
      n, [&](std::size_t i) { return veorq_u64(vld1q_u64(a + i), vld1q_u64(b + i)); },
      [&](std::size_t i) { return static_cast<std::uint64_t>(std::popcount(a[i] ^ b[i])); });
}

}  // namespace

const KernelTable kTable{Isa::Neon, Dot, Axpy, Popcount, PopcountAnd, PopcountAnd3, Hamming};

}  // namespace rlfs::simd::neon
