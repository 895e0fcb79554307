#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rlfs {

enum class FeatureCategory { Permission, Intent, NGram, Synthetic };

std::string_view category_name(FeatureCategory category);

struct FeatureEntry {
  std::size_t index = 0;
  std::string name;
  FeatureCategory category = FeatureCategory::Synthetic;

  bool operator==(const FeatureEntry&) const = default;
};

// Ordered feature dictionary. Indices are contiguous 0..N-1; names are
// unique within a category.
class FeatureDictionary {
 public:
  FeatureDictionary() = default;

  // Appends an entry and returns its index. Throws SchemaError on a
  // duplicate (name, category).
  std::size_t add(std::string name, FeatureCategory category);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const FeatureEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const FeatureEntry> entries() const { return entries_; }

  std::optional<std::size_t> find(std::string_view name, FeatureCategory category) const;
  std::vector<std::size_t> indices_of(FeatureCategory category) const;

  bool operator==(const FeatureDictionary&) const = default;

 private:
  std::vector<FeatureEntry> entries_;
};

// CSV header token for an entry: "perm:", "intent:" and "ngram:" prefixes
// carry the category; synthetic features are written bare.
std::string header_name(const FeatureEntry& entry);
FeatureEntry parse_header_name(std::string_view token);

// Immutable labelled binary matrix. Cells are stored row-major as bytes and,
// additionally, bit-packed per row and per column for the popcount kernels.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(FeatureDictionary dictionary, std::vector<std::uint8_t> cells,
               std::vector<std::uint8_t> labels);

  const FeatureDictionary& dictionary() const { return dictionary_; }
  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_features() const { return dictionary_.size(); }
  bool empty() const { return labels_.empty(); }

  std::uint8_t cell(std::size_t row, std::size_t col) const {
    return cells_[row * n_features() + col];
  }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * n_features(), n_features()};
  }
  std::uint8_t label(std::size_t r) const { return labels_[r]; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<const std::uint8_t> cells() const { return cells_; }

  std::size_t row_words() const { return row_words_; }
  std::size_t column_words() const { return column_words_; }
  std::span<const std::uint64_t> packed_row(std::size_t r) const {
    return {packed_rows_.data() + r * row_words_, row_words_};
  }
  std::span<const std::uint64_t> packed_column(std::size_t c) const {
    return {packed_columns_.data() + c * column_words_, column_words_};
  }
  std::span<const std::uint64_t> packed_labels() const { return packed_labels_; }

  // {benign count, malware count}
  std::array<std::size_t, 2> class_counts() const;
  bool has_both_classes() const;

  // Rows in the given order; repeats allowed (bootstrap samples).
  SampleMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const SampleMatrix& other) const {
    return dictionary_ == other.dictionary_ && cells_ == other.cells_ && labels_ == other.labels_;
  }

 private:
  FeatureDictionary dictionary_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint8_t> labels_;
  std::size_t row_words_ = 0;
  std::size_t column_words_ = 0;
  std::vector<std::uint64_t> packed_rows_;
  std::vector<std::uint64_t> packed_columns_;
  std::vector<std::uint64_t> packed_labels_;
};

std::vector<std::uint64_t> pack_bits(std::span<const std::uint8_t> bits);

SampleMatrix load_csv(const std::filesystem::path& path);
void write_csv(const SampleMatrix& matrix, const std::filesystem::path& path);

struct KFold {
  std::size_t k = 10;
};
struct Holdout {
  double fraction = 0.2;  // share of rows assigned to partition 1 (test)
};
using SplitKind = std::variant<KFold, Holdout>;

struct SplitPlan {
  SplitKind kind;
  // Fold id for kfold; 0 = train / 1 = test for holdout.
  std::vector<std::size_t> assignment;
  std::uint64_t seed = 0;

  std::size_t parts() const;
  std::vector<std::size_t> rows_in(std::size_t part) const;
  std::vector<std::size_t> rows_out(std::size_t part) const;
};

SplitPlan stratified_split(const SampleMatrix& matrix, const SplitKind& kind, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n_samples = 2000;
  std::size_t n_features = 100;
  std::vector<std::size_t> informative;
  double fidelity = 0.75;  // P(informative bit == label)
  std::uint64_t seed = 0;
};

SampleMatrix generate_synthetic(const SyntheticSpec& spec);

// Column restriction to a strictly increasing 0-based index list.
SampleMatrix project(const SampleMatrix& matrix, std::span<const std::size_t> subset);

}  // namespace rlfs
