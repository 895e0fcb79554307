#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rlfs/dataset.hpp"

namespace rlfs {

// Filter-method ranking: per-feature scores and the indices ordered by
// descending score (ties by ascending index).
struct RankedFeatures {
  std::vector<double> scores;
  std::vector<std::size_t> order;
};

RankedFeatures rank_by_scores(std::vector<double> scores);

// H(Y) - H(Y | X_i) in bits from empirical counts.
RankedFeatures information_gain(const SampleMatrix& matrix);

// Pearson chi-square of the 2x2 feature/label table; cells with expected
// count 0 contribute 0.
RankedFeatures chi_square(const SampleMatrix& matrix);

std::vector<std::size_t> random_subset(std::size_t n, std::size_t size, std::uint64_t seed);

std::vector<std::size_t> top_k(const RankedFeatures& ranked, std::size_t k);

}  // namespace rlfs
