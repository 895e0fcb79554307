#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rlfs/dataset.hpp"

namespace rlfs {

struct DecisionTreeParams {
  bool operator==(const DecisionTreeParams&) const = default;
};

struct RandomForestParams {
  std::size_t trees = 100;
  // Candidate features per split; 0 means ceil(sqrt(N)).
  std::size_t max_features = 0;
  bool operator==(const RandomForestParams&) const = default;
};

struct KnnParams {
  std::size_t k = 5;
  bool operator==(const KnnParams&) const = default;
};

struct LinearSvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 10;
  bool operator==(const LinearSvmParams&) const = default;
};

using ClassifierKind = std::variant<DecisionTreeParams, RandomForestParams, KnnParams, LinearSvmParams>;

// "decision_tree", "random_forest", "knn", "linear_svm"
std::string classifier_name(const ClassifierKind& kind);
// Also accepts the short forms dt, rf, knn, svm. Throws ArgumentError.
ClassifierKind classifier_from_name(std::string_view name);
void validate(const ClassifierKind& kind);

// Gini impurity of a node holding n0 benign and n1 malware rows.
double gini_impurity(std::size_t n0, std::size_t n1);

struct TreeNode {
  // Leaves have feature == kLeaf.
  static constexpr std::uint32_t kLeaf = UINT32_MAX;
  std::uint32_t feature = kLeaf;
  std::uint32_t zero_child = 0;
  std::uint32_t one_child = 0;
  std::uint8_t label = 0;
  std::uint32_t n0 = 0;
  std::uint32_t n1 = 0;

  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  // CART with Gini impurity and no depth cap. A node is split while it is
  // impure and some candidate feature varies inside it; the split with the
  // lowest weighted child impurity wins, ties to the lowest feature index.
  // max_features == 0 considers every feature at every node.
  static DecisionTree fit(const SampleMatrix& matrix, std::size_t max_features = 0,
                          std::uint64_t seed = 0);
  // Single-leaf tree, used for one-class bootstrap samples.
  static DecisionTree constant(std::uint8_t label, std::size_t n0, std::size_t n1);

  std::uint8_t predict(std::span<const std::uint8_t> row) const;
  std::span<const TreeNode> nodes() const { return nodes_; }
  std::size_t depth() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

class RandomForest {
 public:
  static RandomForest fit(const SampleMatrix& matrix, const RandomForestParams& params,
                          std::uint64_t seed);
  std::uint8_t predict(std::span<const std::uint8_t> row) const;
  std::span<const DecisionTree> trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

// Bootstrap sample (n draws with replacement) used for forest tree t.
SampleMatrix forest_bootstrap(const SampleMatrix& matrix, std::uint64_t forest_seed, std::size_t tree);
std::uint64_t forest_tree_seed(std::uint64_t forest_seed, std::size_t tree);

class Knn {
 public:
  static Knn fit(const SampleMatrix& matrix, const KnnParams& params);
  // Hamming-distance k-vote; distance ties go to the lower training row.
  std::uint8_t predict_packed(std::span<const std::uint64_t> row) const;

 private:
  std::size_t k_ = 1;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::uint8_t> labels_;
};

class LinearSvm {
 public:
  // Pegasos: hinge loss, stochastic subgradient steps of size 1/(lambda t),
  // bias learned as the weight of a constant input.
  static LinearSvm fit(const SampleMatrix& matrix, const LinearSvmParams& params, std::uint64_t seed);
  double decision(std::span<const std::uint8_t> row) const;
  std::uint8_t predict(std::span<const std::uint8_t> row) const { return decision(row) >= 0.0 ? 1 : 0; }
  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
};

class TrainedClassifier {
 public:
  using Model = std::variant<DecisionTree, RandomForest, Knn, LinearSvm>;

  TrainedClassifier(ClassifierKind kind, Model model, std::size_t width, std::uint64_t seed)
      : kind_(std::move(kind)), model_(std::move(model)), width_(width), seed_(seed) {}

  const ClassifierKind& kind() const { return kind_; }
  const Model& model() const { return model_; }
  std::size_t width() const { return width_; }
  std::uint64_t seed() const { return seed_; }

  std::uint8_t predict_row(std::span<const std::uint8_t> row) const;

 private:
  ClassifierKind kind_;
  Model model_;
  std::size_t width_;
  std::uint64_t seed_;
};

TrainedClassifier fit(const ClassifierKind& kind, const SampleMatrix& matrix, std::uint64_t seed);

std::vector<std::uint8_t> predict(const TrainedClassifier& clf, const SampleMatrix& rows);
std::vector<std::uint8_t> predict(const TrainedClassifier& clf,
                                  std::span<const std::vector<std::uint8_t>> rows);

double accuracy(const TrainedClassifier& clf, const SampleMatrix& matrix);

struct CvResult {
  double mean = 0.0;
  std::vector<double> per_fold;
};

CvResult cv_accuracy(const ClassifierKind& kind, const SampleMatrix& matrix, const SplitPlan& plan,
                     std::uint64_t seed);

}  // namespace rlfs
