#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rlfs/baselines.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

using namespace rlfs;

namespace {

SampleMatrix Columns(const std::vector<std::vector<std::uint8_t>>& cols, std::vector<std::uint8_t> labels) {
  FeatureDictionary d;
  for (std::size_t c = 0; c < cols.size(); ++c) d.add("f" + std::to_string(c), FeatureCategory::Synthetic);
  std::vector<std::uint8_t> cells(labels.size() * cols.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) cells[r * cols.size() + c] = cols[c][r];
  }
  return SampleMatrix(d, cells, std::move(labels));
}

double Entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace

TEST_CASE("information gain hand values") {
  const auto m = Columns({{0, 0, 1, 1}, {0, 1, 0, 1}}, {0, 0, 1, 1});
  const auto ig = information_gain(m);
  CHECK(std::abs(ig.scores[0] - 1.0) < 1e-12);
  CHECK(std::abs(ig.scores[1]) < 1e-12);

  // H(Y) = H(1/4); X=0 holds two zeros, X=1 holds one zero and one one.
  const auto skew = information_gain(Columns({{0, 0, 1, 1}}, {0, 0, 0, 1}));
  const double want = Entropy(0.25) - 0.5 * Entropy(0.5);
  CHECK(std::abs(skew.scores[0] - want) < 1e-9);
  CHECK(std::abs(skew.scores[0] - 0.3113) < 1e-4);
}

TEST_CASE("chi-square hand values") {
  for (std::size_t n : {1, 3, 50}) {
    std::vector<std::uint8_t> labels(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) labels[i] = i < n ? 0 : 1;
    const auto m = Columns({labels, std::vector<std::uint8_t>(2 * n, 1)}, labels);
    const auto chi = chi_square(m);
    CHECK(std::abs(chi.scores[0] - 2.0 * n) < 1e-9);
    CHECK(chi.scores[1] == 0.0);
  }
  const auto indep = Columns({{0, 1, 0, 1, 0, 1, 0, 1}}, {0, 0, 0, 0, 1, 1, 1, 1});
  CHECK(std::abs(chi_square(indep).scores[0]) < 1e-12);
}

TEST_CASE("rankers reject degenerate label sets") {
  const auto one_class = Columns({{0, 1}}, {1, 1});
  CHECK_THROWS_AS(information_gain(one_class), ArgumentError);
  CHECK_THROWS_AS(chi_square(one_class), ArgumentError);
}

TEST_CASE("information gain stays within [0, 1] and rankers ignore row order") {
  const auto m = generate_synthetic({400, 25, {2, 9}, 0.8, 31});
  const auto ig = information_gain(m);
  const auto chi = chi_square(m);
  for (double s : ig.scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  std::vector<std::size_t> perm(m.n_rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  Rng rng(4);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  const auto shuffled = m.select_rows(perm);
  const auto ig2 = information_gain(shuffled);
  const auto chi2 = chi_square(shuffled);
  for (std::size_t c = 0; c < m.n_features(); ++c) {
    CHECK(ig2.scores[c] == doctest::Approx(ig.scores[c]).epsilon(1e-12));
    CHECK(chi2.scores[c] == doctest::Approx(chi.scores[c]).epsilon(1e-12));
  }
  CHECK(ig2.order == ig.order);
}

TEST_CASE("informative features outrank noise across seeds") {
  const std::vector<std::size_t> informative{4, 11, 30, 47};
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ig = information_gain(generate_synthetic({2000, 60, informative, 0.8, seed}));
    auto top = top_k(ig, informative.size());
    good += top == informative;
  }
  CHECK(good >= 19);
}

TEST_CASE("rank ties go to the lower index") {
  const auto r = rank_by_scores({0.5, 1.0, 0.5, 1.0});
  CHECK(r.order == std::vector<std::size_t>{1, 3, 0, 2});
  CHECK(top_k(r, 1) == std::vector<std::size_t>{1});
  CHECK(top_k(r, 2) == std::vector<std::size_t>{1, 3});
  CHECK(top_k(r, 4) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(top_k(r, 0).empty());
}

TEST_CASE("random_subset") {
  CHECK(random_subset(5, 5, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(random_subset(5, 0, 1).empty());
  CHECK(random_subset(100, 10, 3) == random_subset(100, 10, 3));
  const auto s = random_subset(100, 10, 3);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  CHECK_THROWS_AS(random_subset(3, 4, 1), ArgumentError);
}
