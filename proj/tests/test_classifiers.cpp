#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "rlfs/baselines.hpp"
#include "rlfs/classifiers.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

#include "oracles.hpp"

using namespace rlfs;

namespace {

SampleMatrix Rows(std::size_t width, const std::vector<std::uint8_t>& cells, std::vector<std::uint8_t> labels) {
  FeatureDictionary d;
  for (std::size_t c = 0; c < width; ++c) d.add("f" + std::to_string(c), FeatureCategory::Synthetic);
  return SampleMatrix(d, cells, std::move(labels));
}

SampleMatrix RandomMatrix(std::size_t rows, std::size_t width, Rng& rng) {
  std::vector<std::uint8_t> cells(rows * width);
  for (auto& c : cells) c = rng.bernoulli(0.5);
  std::vector<std::uint8_t> labels(rows);
  for (auto& l : labels) l = rng.bernoulli(0.5);
  labels[0] = 0;
  labels[1] = 1;
  return Rows(width, cells, labels);
}

}  // namespace

TEST_CASE("gini impurity") {
  CHECK(gini_impurity(2, 2) == 0.5);
  CHECK(gini_impurity(4, 0) == 0.0);
  CHECK(gini_impurity(0, 3) == 0.0);
}

TEST_CASE("decision tree fits a copied label exactly") {
  const auto m = generate_synthetic({300, 6, {2}, 1.0, 1});
  const auto clf = fit(DecisionTreeParams{}, m, 0);
  CHECK(accuracy(clf, m) == 1.0);
}

TEST_CASE("decision tree reaches full training accuracy on consistent data") {
  // XOR needs a zero-gain first split.
  const auto xor_m = Rows(2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
  CHECK(accuracy(fit(DecisionTreeParams{}, xor_m, 0), xor_m) == 1.0);

  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t width = 3 + rng.uniform_index(8);
    // Labels as a random function of the row make the data consistent.
    std::vector<std::uint8_t> cells(80 * width);
    for (auto& c : cells) c = rng.bernoulli(0.5);
    const std::uint64_t salt = rng.next();
    std::vector<std::uint8_t> labels(80);
    for (std::size_t r = 0; r < 80; ++r) {
      std::uint64_t h = salt;
      for (std::size_t c = 0; c < width; ++c) h = derive_seed(h, "bit", cells[r * width + c]);
      labels[r] = h & 1;
    }
    const auto m = Rows(width, cells, labels);
    if (!m.has_both_classes()) continue;
    CHECK(accuracy(fit(DecisionTreeParams{}, m, 0), m) == 1.0);
  }
}

TEST_CASE("decision tree matches the brute-force optimal depth-2 tree") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 2 + rng.uniform_index(15);
    const auto m = RandomMatrix(rows, 2, rng);
    const double best = oracle::best_tree_accuracy(m, 2);
    CAPTURE(trial);
    CHECK(accuracy(fit(DecisionTreeParams{}, m, 0), m) == best);
  }
}

TEST_CASE("decision tree ties pick the lowest feature index") {
  // Columns 0 and 1 are identical copies of the label.
  const auto m = Rows(3, {0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1, 0}, {0, 1, 0, 1});
  const auto tree = DecisionTree::fit(m);
  REQUIRE(tree.nodes().size() == 3);
  CHECK(tree.nodes()[0].feature == 0);
}

TEST_CASE("knn with k=1 recovers training labels") {
  Rng rng(8);
  const auto m = RandomMatrix(40, 24, rng);
  const auto clf = fit(KnnParams{1}, m, 0);
  CHECK(accuracy(clf, m) == 1.0);
  CHECK_THROWS_AS(validate(KnnParams{2}), ArgumentError);
}

TEST_CASE("one-tree forest equals a tree on the same bootstrap") {
  Rng rng(3);
  const auto m = RandomMatrix(60, 12, rng);
  const RandomForestParams params{1, 3};
  const auto forest = RandomForest::fit(m, params, 55);
  const auto boot = forest_bootstrap(m, 55, 0);
  const auto tree = DecisionTree::fit(boot, 3, forest_tree_seed(55, 0));
  REQUIRE(forest.trees().size() == 1);
  CHECK(forest.trees()[0] == tree);
}

TEST_CASE("forest and svm learn a planted signal") {
  const auto train = generate_synthetic({600, 20, {0, 1, 2}, 0.9, 1});
  const auto test = generate_synthetic({600, 20, {0, 1, 2}, 0.9, 2});
  CHECK(accuracy(fit(RandomForestParams{30, 0}, train, 4), test) > 0.9);
  CHECK(accuracy(fit(LinearSvmParams{}, train, 4), test) > 0.9);
  CHECK(accuracy(fit(KnnParams{5}, train, 4), test) > 0.6);
}

TEST_CASE("predict edge cases") {
  const auto m = generate_synthetic({50, 4, {0}, 1.0, 1});
  const auto clf = fit(DecisionTreeParams{}, m, 0);
  const std::vector<std::vector<std::uint8_t>> none;
  CHECK(predict(clf, none).empty());
  const std::vector<std::vector<std::uint8_t>> wide{{0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(predict(clf, wide), ArgumentError);
}

TEST_CASE("accuracy hand values") {
  // A depth-one tree on a single column predicts exactly that column.
  const auto train = Rows(1, {0, 1}, {0, 1});
  const auto clf = fit(DecisionTreeParams{}, train, 0);
  CHECK(accuracy(clf, Rows(1, {0, 1, 1, 0}, {0, 1, 1, 1})) == 0.75);
  CHECK(accuracy(clf, Rows(1, {0, 1}, {0, 1})) == 1.0);
  const auto zero = fit(DecisionTreeParams{}, Rows(1, {0, 0, 0}, {0, 0, 1}), 0);
  CHECK(accuracy(zero, Rows(1, {1, 0, 1, 0}, {0, 0, 1, 1})) == 0.5);
}

TEST_CASE("fit rejects degenerate training sets") {
  CHECK_THROWS_AS(fit(DecisionTreeParams{}, Rows(1, {}, {}), 0), FitError);
  CHECK_THROWS_AS(fit(DecisionTreeParams{}, Rows(1, {0, 1}, {1, 1}), 0), FitError);
}

TEST_CASE("cross-validation") {
  const auto m = generate_synthetic({500, 5, {1}, 1.0, 6});
  const auto plan = stratified_split(m, KFold{10}, 2);
  const auto cv = cv_accuracy(DecisionTreeParams{}, m, plan, 0);
  CHECK(cv.mean == 1.0);
  REQUIRE(cv.per_fold.size() == 10);

  // Constant features force the majority label of each training fold.
  std::vector<std::uint8_t> labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = i < 70 ? 1 : 0;
  const auto flat = Rows(3, std::vector<std::uint8_t>(300, 1), labels);
  const auto flat_plan = stratified_split(flat, KFold{10}, 4);
  const auto flat_cv = cv_accuracy(DecisionTreeParams{}, flat, flat_plan, 0);
  double sum = 0.0;
  for (std::size_t f = 0; f < 10; ++f) {
    std::array<std::size_t, 2> train{};
    for (auto r : flat_plan.rows_out(f)) ++train[labels[r]];
    const std::uint8_t majority = train[1] > train[0] ? 1 : 0;
    std::size_t hit = 0;
    const auto test = flat_plan.rows_in(f);
    for (auto r : test) hit += labels[r] == majority;
    const double want = static_cast<double>(hit) / static_cast<double>(test.size());
    CHECK(flat_cv.per_fold[f] == want);
    sum += flat_cv.per_fold[f];
  }
  CHECK(flat_cv.mean == doctest::Approx(sum / 10.0).epsilon(1e-15));
  CHECK(flat_cv.mean == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("fits are deterministic in the seed") {
  const auto m = generate_synthetic({200, 16, {0, 5}, 0.8, 12});
  for (const ClassifierKind& kind : {ClassifierKind{DecisionTreeParams{}}, ClassifierKind{RandomForestParams{10, 0}},
                                     ClassifierKind{KnnParams{3}}, ClassifierKind{LinearSvmParams{}}}) {
    CAPTURE(classifier_name(kind));
    const auto a = predict(fit(kind, m, 9), m);
    const auto b = predict(fit(kind, m, 9), m);
    CHECK(a == b);
  }
}
