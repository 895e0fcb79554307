#include "rlfs/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"
#include "rlfs/simd.hpp"

namespace rlfs {
namespace {

// counts[x][y] for feature c.
using Table = std::array<std::array<double, 2>, 2>;

void CheckRankable(const SampleMatrix& m) {
  if (m.empty()) throw ArgumentError("cannot rank features of an empty matrix");
  if (!m.has_both_classes()) throw ArgumentError("feature ranking needs both classes present");
}

Table Contingency(const SampleMatrix& m, std::size_t c, std::array<std::size_t, 2> class_counts) {
  const auto ones = static_cast<double>(simd::popcount(m.packed_column(c)));
  const auto ones_pos = static_cast<double>(simd::popcount_and(m.packed_column(c), m.packed_labels()));
  Table t;
  t[1][1] = ones_pos;
  t[1][0] = ones - ones_pos;
  t[0][1] = static_cast<double>(class_counts[1]) - ones_pos;
  t[0][0] = static_cast<double>(class_counts[0]) - t[1][0];
  return t;
}

double PLogP(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double Entropy2(double a, double b) {
  const double n = a + b;
  if (n == 0.0) return 0.0;
  return -(PLogP(a / n) + PLogP(b / n));
}

}  // namespace

RankedFeatures rank_by_scores(std::vector<double> scores) {
  RankedFeatures ranked;
  ranked.order.resize(scores.size());
  std::iota(ranked.order.begin(), ranked.order.end(), 0);
  std::stable_sort(ranked.order.begin(), ranked.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  ranked.scores = std::move(scores);
  return ranked;
}

RankedFeatures information_gain(const SampleMatrix& matrix) {
  CheckRankable(matrix);
  const auto counts = matrix.class_counts();
  const double n = static_cast<double>(matrix.n_rows());
  const double h_y = Entropy2(static_cast<double>(counts[0]), static_cast<double>(counts[1]));
  std::vector<double> scores(matrix.n_features());
  for (std::size_t c = 0; c < matrix.n_features(); ++c) {
    const auto t = Contingency(matrix, c, counts);
    const double n0 = t[0][0] + t[0][1];
    const double n1 = t[1][0] + t[1][1];
    const double h_y_given_x = (n0 / n) * Entropy2(t[0][0], t[0][1]) + (n1 / n) * Entropy2(t[1][0], t[1][1]);
    scores[c] = std::max(0.0, h_y - h_y_given_x);
  }
  return rank_by_scores(std::move(scores));
}

RankedFeatures chi_square(const SampleMatrix& matrix) {
  CheckRankable(matrix);
  const auto counts = matrix.class_counts();
  const double n = static_cast<double>(matrix.n_rows());
  std::vector<double> scores(matrix.n_features());
  for (std::size_t c = 0; c < matrix.n_features(); ++c) {
    const auto t = Contingency(matrix, c, counts);
    double chi = 0.0;
    for (int x = 0; x < 2; ++x) {
      const double row = t[x][0] + t[x][1];
      for (int y = 0; y < 2; ++y) {
        const double expected = row * static_cast<double>(counts[y]) / n;
        if (expected == 0.0) continue;
        const double diff = t[x][y] - expected;
        chi += diff * diff / expected;
      }
    }
    scores[c] = chi;
  }
  return rank_by_scores(std::move(scores));
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t size, std::uint64_t seed) {
  if (size > n) {
    throw ArgumentError("random subset of size " + std::to_string(size) + " exceeds " +
                        std::to_string(n) + " features");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> top_k(const RankedFeatures& ranked, std::size_t k) {
  if (k > ranked.order.size()) {
    throw ArgumentError("top_k: k=" + std::to_string(k) + " exceeds " +
                        std::to_string(ranked.order.size()) + " features");
  }
  std::vector<std::size_t> out(ranked.order.begin(), ranked.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rlfs
