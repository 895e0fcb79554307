#include "rlfs/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"
#include "rlfs/simd.hpp"

namespace rlfs {
namespace {

using Int128 = __int128;

void CheckTrainable(const SampleMatrix& matrix) {
  if (matrix.empty()) throw FitError("cannot fit a classifier on an empty matrix");
  if (!matrix.has_both_classes()) {
    throw FitError("cannot fit a classifier on a single-class matrix (" +
                   std::to_string(matrix.n_rows()) + " rows, all label " +
                   std::to_string(matrix.label(0)) + ")");
  }
}

void CheckWidth(std::size_t got, std::size_t want) {
  if (got != want) {
    throw ArgumentError("row width " + std::to_string(got) + " does not match trained width " +
                        std::to_string(want));
  }
}

// Split quality as an exact fraction num/den of
//   (a0^2 + b0^2) / n_zero + (a1^2 + b1^2) / n_one,
// which is maximal exactly when weighted child Gini impurity is minimal.
struct SplitScore {
  Int128 num = 0;
  Int128 den = 1;

  bool better_than(const SplitScore& o) const { return num * o.den > o.num * den; }
  bool equals(const SplitScore& o) const { return num * o.den == o.num * den; }
};

SplitScore ScoreSplit(std::uint64_t n0, std::uint64_t n1, std::uint64_t ones, std::uint64_t ones_pos) {
  const Int128 one_b = ones_pos;
  const Int128 one_a = static_cast<Int128>(ones) - one_b;
  const Int128 zero_b = static_cast<Int128>(n1) - one_b;
  const Int128 zero_a = static_cast<Int128>(n0) - one_a;
  const Int128 n_zero = zero_a + zero_b;
  const Int128 n_one = one_a + one_b;
  const Int128 s_zero = zero_a * zero_a + zero_b * zero_b;
  const Int128 s_one = one_a * one_a + one_b * one_b;
  return {s_zero * n_one + s_one * n_zero, n_zero * n_one};
}

class TreeBuilder {
 public:
  TreeBuilder(const SampleMatrix& m, std::size_t max_features, std::uint64_t seed)
      : m_(m), max_features_(max_features), rng_(seed), mask_(m.column_words()) {
    const std::size_t n = m.n_features();
    if (max_features_ == 0 || max_features_ >= n) max_features_ = 0;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    ones_.resize(n);
    ones_pos_.resize(n);
  }

  std::vector<TreeNode> build() {
    std::vector<std::uint32_t> all(m_.n_rows());
    std::iota(all.begin(), all.end(), 0u);
    nodes_.push_back({});
    stack_.push_back({0, std::move(all)});
    while (!stack_.empty()) {
      auto [id, rows] = std::move(stack_.back());
      stack_.pop_back();
      expand(id, std::move(rows));
    }
    return std::move(nodes_);
  }

 private:
  struct Pending {
    std::uint32_t id;
    std::vector<std::uint32_t> rows;
  };

  void expand(std::uint32_t id, std::vector<std::uint32_t> rows) {
    std::uint32_t n1 = 0;
    for (std::uint32_t r : rows) n1 += m_.label(r);
    const auto n0 = static_cast<std::uint32_t>(rows.size()) - n1;
    TreeNode& node = nodes_[id];
    node.n0 = n0;
    node.n1 = n1;
    node.label = n1 > n0 ? 1 : 0;
    if (n0 == 0 || n1 == 0 || m_.n_features() == 0) return;

    const auto best = choose_feature(rows, n0, n1);
    if (!best) return;

    std::vector<std::uint32_t> zero_rows;
    std::vector<std::uint32_t> one_rows;
    for (std::uint32_t r : rows) (m_.cell(r, *best) ? one_rows : zero_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const auto zero_id = static_cast<std::uint32_t>(nodes_.size());
    const auto one_id = zero_id + 1;
    nodes_.push_back({});
    nodes_.push_back({});
    TreeNode& split = nodes_[id];
    split.feature = static_cast<std::uint32_t>(*best);
    split.zero_child = zero_id;
    split.one_child = one_id;
    // Zero side is expanded first.
    stack_.push_back({one_id, std::move(one_rows)});
    stack_.push_back({zero_id, std::move(zero_rows)});
  }

  // Fills ones_/ones_pos_ for the given features over the node rows.
  void count(std::span<const std::uint32_t> rows, std::span<const std::size_t> features) {
    const std::size_t words = m_.column_words();
    if (rows.size() > 2 * words) {
      std::fill(mask_.begin(), mask_.end(), 0);
      for (std::uint32_t r : rows) mask_[r / 64] |= std::uint64_t{1} << (r % 64);
      for (std::size_t f : features) {
        ones_[f] = simd::popcount_and(m_.packed_column(f), mask_);
        ones_pos_[f] = simd::popcount_and3(m_.packed_column(f), mask_, m_.packed_labels());
      }
      return;
    }
    for (std::size_t f : features) ones_[f] = ones_pos_[f] = 0;
    for (std::uint32_t r : rows) {
      const auto row = m_.row(r);
      const std::uint8_t label = m_.label(r);
      for (std::size_t f : features) {
        ones_[f] += row[f];
        ones_pos_[f] += row[f] & label;
      }
    }
  }

  std::optional<std::size_t> choose_feature(std::span<const std::uint32_t> rows, std::uint32_t n0,
                                            std::uint32_t n1) {
    const std::uint64_t n = rows.size();
    std::optional<std::size_t> best;
    SplitScore best_score;
    auto consider = [&](std::size_t f) {
      if (ones_[f] == 0 || ones_[f] == n) return false;
      const auto s = ScoreSplit(n0, n1, ones_[f], ones_pos_[f]);
      if (!best || s.better_than(best_score) || (s.equals(best_score) && f < *best)) {
        best = f;
        best_score = s;
      }
      return true;
    };

    if (max_features_ == 0) {
      count(rows, order_);
      for (std::size_t f : order_) consider(f);
      return best;
    }

    // Random candidate order; keep drawing past constant features until
    // max_features varying ones have been scored.
    const std::size_t total = order_.size();
    std::size_t varying = 0;
    std::size_t drawn = 0;
    while (drawn < total && varying < max_features_) {
      const std::size_t batch = std::min(max_features_ - varying, total - drawn);
      for (std::size_t i = drawn; i < drawn + batch; ++i) {
        std::swap(order_[i], order_[i + rng_.uniform_index(total - i)]);
      }
      const std::span<const std::size_t> candidates(order_.data() + drawn, batch);
      count(rows, candidates);
      for (std::size_t f : candidates) varying += consider(f) ? 1 : 0;
      drawn += batch;
    }
    return best;
  }

  const SampleMatrix& m_;
  std::size_t max_features_;
  Rng rng_;
  std::vector<std::uint64_t> mask_;
  std::vector<std::size_t> order_;
  std::vector<std::uint64_t> ones_;
  std::vector<std::uint64_t> ones_pos_;
  std::vector<TreeNode> nodes_;
  std::vector<Pending> stack_;
};

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string classifier_name(const ClassifierKind& kind) {
  return std::visit(Overloaded{
                        [](const DecisionTreeParams&) { return std::string("decision_tree"); },
                        [](const RandomForestParams&) { return std::string("random_forest"); },
                        [](const KnnParams&) { return std::string("knn"); },
                        [](const LinearSvmParams&) { return std::string("linear_svm"); },
                    },
                    kind);
}

ClassifierKind classifier_from_name(std::string_view name) {
  if (name == "decision_tree" || name == "dt") return DecisionTreeParams{};
  if (name == "random_forest" || name == "rf") return RandomForestParams{};
  if (name == "knn") return KnnParams{};
  if (name == "linear_svm" || name == "svm") return LinearSvmParams{};
  throw ArgumentError("unknown classifier '" + std::string(name) + "'");
}

void validate(const ClassifierKind& kind) {
  std::visit(Overloaded{
                 [](const DecisionTreeParams&) {},
                 [](const RandomForestParams& p) {
                   if (p.trees < 1) throw ArgumentError("random forest needs at least one tree");
                 },
                 [](const KnnParams& p) {
                   if (p.k < 1 || p.k % 2 == 0) throw ArgumentError("knn k must be odd and >= 1");
                 },
                 [](const LinearSvmParams& p) {
                   if (!(p.lambda > 0.0)) throw ArgumentError("svm lambda must be > 0");
                   if (p.epochs < 1) throw ArgumentError("svm epochs must be >= 1");
                 },
             },
             kind);
}

double gini_impurity(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

DecisionTree DecisionTree::fit(const SampleMatrix& matrix, std::size_t max_features,
                               std::uint64_t seed) {
  CheckTrainable(matrix);
  DecisionTree tree;
  tree.nodes_ = TreeBuilder(matrix, max_features, seed).build();
  return tree;
}

DecisionTree DecisionTree::constant(std::uint8_t label, std::size_t n0, std::size_t n1) {
  DecisionTree tree;
  TreeNode leaf;
  leaf.label = label;
  leaf.n0 = static_cast<std::uint32_t>(n0);
  leaf.n1 = static_cast<std::uint32_t>(n1);
  tree.nodes_.push_back(leaf);
  return tree;
}

std::uint8_t DecisionTree::predict(std::span<const std::uint8_t> row) const {
  std::uint32_t id = 0;
  while (nodes_[id].feature != TreeNode::kLeaf) {
    const auto& node = nodes_[id];
    id = row[node.feature] ? node.one_child : node.zero_child;
  }
  return nodes_[id].label;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature != TreeNode::kLeaf) {
      level[nodes_[i].zero_child] = level[i] + 1;
      level[nodes_[i].one_child] = level[i] + 1;
    }
  }
  return deepest;
}

std::uint64_t forest_tree_seed(std::uint64_t forest_seed, std::size_t tree) {
  return derive_seed(forest_seed, "tree", tree);
}

SampleMatrix forest_bootstrap(const SampleMatrix& matrix, std::uint64_t forest_seed, std::size_t tree) {
  Rng rng(derive_seed(forest_seed, "bootstrap", tree));
  std::vector<std::size_t> rows(matrix.n_rows());
  for (auto& r : rows) r = rng.uniform_index(matrix.n_rows());
  return matrix.select_rows(rows);
}

RandomForest RandomForest::fit(const SampleMatrix& matrix, const RandomForestParams& params,
                               std::uint64_t seed) {
  CheckTrainable(matrix);
  const std::size_t per_split =
      params.max_features != 0
          ? params.max_features
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(matrix.n_features()))));
  RandomForest forest;
  forest.trees_.reserve(params.trees);
  for (std::size_t t = 0; t < params.trees; ++t) {
    auto sample = forest_bootstrap(matrix, seed, t);
    if (!sample.has_both_classes()) {
      const auto counts = sample.class_counts();
      forest.trees_.push_back(DecisionTree::constant(counts[1] > 0 ? 1 : 0, counts[0], counts[1]));
      continue;
    }
    forest.trees_.push_back(DecisionTree::fit(sample, per_split, forest_tree_seed(seed, t)));
  }
  return forest;
}

std::uint8_t RandomForest::predict(std::span<const std::uint8_t> row) const {
  std::size_t votes = 0;
  for (const auto& tree : trees_) votes += tree.predict(row);
  return 2 * votes > trees_.size() ? 1 : 0;
}

Knn Knn::fit(const SampleMatrix& matrix, const KnnParams& params) {
  CheckTrainable(matrix);
  Knn knn;
  knn.k_ = std::min(params.k, matrix.n_rows());
  knn.words_ = matrix.row_words();
  knn.rows_.reserve(matrix.n_rows() * knn.words_);
  for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
    const auto packed = matrix.packed_row(r);
    knn.rows_.insert(knn.rows_.end(), packed.begin(), packed.end());
  }
  knn.labels_.assign(matrix.labels().begin(), matrix.labels().end());
  return knn;
}

std::uint8_t Knn::predict_packed(std::span<const std::uint64_t> row) const {
  const std::size_t n = labels_.size();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> dist(n);
  const auto& kernels = simd::active();
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = {kernels.hamming(rows_.data() + i * words_, row.data(), words_),
               static_cast<std::uint32_t>(i)};
  }
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1), dist.end());
  std::size_t votes = 0;
  for (std::size_t i = 0; i < k_; ++i) votes += labels_[dist[i].second];
  return 2 * votes > k_ ? 1 : 0;
}

LinearSvm LinearSvm::fit(const SampleMatrix& matrix, const LinearSvmParams& params,
                         std::uint64_t seed) {
  CheckTrainable(matrix);
  const std::size_t n = matrix.n_rows();
  const std::size_t dim = matrix.n_features();
  std::vector<double> w(dim + 1, 0.0);  // last entry multiplies a constant 1
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (std::size_t r : order) {
      ++t;
      const double eta = 1.0 / (params.lambda * static_cast<double>(t));
      const double y = matrix.label(r) ? 1.0 : -1.0;
      const auto row = matrix.row(r);
      double score = w[dim];
      for (std::size_t c = 0; c < dim; ++c) {
        if (row[c]) score += w[c];
      }
      const double decay = 1.0 - eta * params.lambda;
      for (double& v : w) v *= decay;
      if (y * score < 1.0) {
        for (std::size_t c = 0; c < dim; ++c) {
          if (row[c]) w[c] += eta * y;
        }
        w[dim] += eta * y;
      }
    }
  }
  LinearSvm svm;
  svm.bias_ = w[dim];
  w.pop_back();
  svm.weights_ = std::move(w);
  return svm;
}

double LinearSvm::decision(std::span<const std::uint8_t> row) const {
  double score = bias_;
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    if (row[c]) score += weights_[c];
  }
  return score;
}

std::uint8_t TrainedClassifier::predict_row(std::span<const std::uint8_t> row) const {
  CheckWidth(row.size(), width_);
  return std::visit(Overloaded{
                        [&](const DecisionTree& m) { return m.predict(row); },
                        [&](const RandomForest& m) { return m.predict(row); },
                        [&](const Knn& m) { return m.predict_packed(pack_bits(row)); },
                        [&](const LinearSvm& m) { return m.predict(row); },
                    },
                    model_);
}

TrainedClassifier fit(const ClassifierKind& kind, const SampleMatrix& matrix, std::uint64_t seed) {
  validate(kind);
  auto model = std::visit(
      Overloaded{
          [&](const DecisionTreeParams&) -> TrainedClassifier::Model {
            return DecisionTree::fit(matrix);
          },
          [&](const RandomForestParams& p) -> TrainedClassifier::Model {
            return RandomForest::fit(matrix, p, seed);
          },
          [&](const KnnParams& p) -> TrainedClassifier::Model { return Knn::fit(matrix, p); },
          [&](const LinearSvmParams& p) -> TrainedClassifier::Model {
            return LinearSvm::fit(matrix, p, seed);
          },
      },
      kind);
  return TrainedClassifier(kind, std::move(model), matrix.n_features(), seed);
}

std::vector<std::uint8_t> predict(const TrainedClassifier& clf, const SampleMatrix& rows) {
  CheckWidth(rows.n_features(), clf.width());
  std::vector<std::uint8_t> out(rows.n_rows());
  if (const auto* knn = std::get_if<Knn>(&clf.model())) {
    for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = knn->predict_packed(rows.packed_row(r));
    return out;
  }
  for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = clf.predict_row(rows.row(r));
  return out;
}

std::vector<std::uint8_t> predict(const TrainedClassifier& clf,
                                  std::span<const std::vector<std::uint8_t>> rows) {
  std::vector<std::uint8_t> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(clf.predict_row(row));
  return out;
}

double accuracy(const TrainedClassifier& clf, const SampleMatrix& matrix) {
  if (matrix.empty()) throw ArgumentError("accuracy of an empty matrix is undefined");
  const auto predicted = predict(clf, matrix);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < matrix.n_rows(); ++r) correct += predicted[r] == matrix.label(r);
  return static_cast<double>(correct) / static_cast<double>(matrix.n_rows());
}

CvResult cv_accuracy(const ClassifierKind& kind, const SampleMatrix& matrix, const SplitPlan& plan,
                     std::uint64_t seed) {
  if (!std::holds_alternative<KFold>(plan.kind)) {
    throw ArgumentError("cv_accuracy requires a kfold split plan");
  }
  if (plan.assignment.size() != matrix.n_rows()) {
    throw ArgumentError("split plan covers " + std::to_string(plan.assignment.size()) +
                        " rows but the matrix has " + std::to_string(matrix.n_rows()));
  }
  CvResult result;
  const std::size_t k = plan.parts();
  for (std::size_t fold = 0; fold < k; ++fold) {
    const auto train_rows = plan.rows_out(fold);
    const auto test_rows = plan.rows_in(fold);
    try {
      const auto clf = fit(kind, matrix.select_rows(train_rows), derive_seed(seed, "fold", fold));
      result.per_fold.push_back(accuracy(clf, matrix.select_rows(test_rows)));
    } catch (const FitError& e) {
      throw FitError("fold " + std::to_string(fold) + ": " + e.what());
    }
  }
  result.mean = std::accumulate(result.per_fold.begin(), result.per_fold.end(), 0.0) /
                static_cast<double>(k);
  return result;
}

}  // namespace rlfs
