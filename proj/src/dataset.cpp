#include "rlfs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {
namespace {

constexpr std::string_view kLabelColumn = "label";

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      return out;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

void Shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

std::array<std::vector<std::size_t>, 2> RowsByClass(const SampleMatrix& m) {
  std::array<std::vector<std::size_t>, 2> out;
  for (std::size_t r = 0; r < m.n_rows(); ++r) out[m.label(r)].push_back(r);
  return out;
}

}  // namespace

std::string_view category_name(FeatureCategory category) {
  switch (category) {
    case FeatureCategory::Permission:
      return "permission";
    case FeatureCategory::Intent:
      return "intent";
    case FeatureCategory::NGram:
      return "ngram";
    case FeatureCategory::Synthetic:
      return "synthetic";
  }
  return "synthetic";
}

std::size_t FeatureDictionary::add(std::string name, FeatureCategory category) {
  if (find(name, category)) {
    throw SchemaError("duplicate feature name '" + name + "' in category " +
                      std::string(category_name(category)));
  }
  const std::size_t index = entries_.size();
  entries_.push_back({index, std::move(name), category});
  return index;
}

std::optional<std::size_t> FeatureDictionary::find(std::string_view name,
                                                   FeatureCategory category) const {
  for (const auto& e : entries_) {
    if (e.category == category && e.name == name) return e.index;
  }
  return std::nullopt;
}

std::vector<std::size_t> FeatureDictionary::indices_of(FeatureCategory category) const {
  std::vector<std::size_t> out;
  for (const auto& e : entries_) {
    if (e.category == category) out.push_back(e.index);
  }
  return out;
}

std::string header_name(const FeatureEntry& entry) {
  switch (entry.category) {
    case FeatureCategory::Permission:
      return "perm:" + entry.name;
    case FeatureCategory::Intent:
      return "intent:" + entry.name;
    case FeatureCategory::NGram:
      return "ngram:" + entry.name;
    case FeatureCategory::Synthetic:
      return entry.name;
  }
  return entry.name;
}

FeatureEntry parse_header_name(std::string_view token) {
  const std::pair<std::string_view, FeatureCategory> prefixes[] = {
      {"perm:", FeatureCategory::Permission},
      {"intent:", FeatureCategory::Intent},
      {"ngram:", FeatureCategory::NGram},
  };
  for (const auto& [prefix, category] : prefixes) {
    if (token.starts_with(prefix)) {
      return {0, std::string(token.substr(prefix.size())), category};
    }
  }
  return {0, std::string(token), FeatureCategory::Synthetic};
}

std::vector<std::uint64_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint64_t> out((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return out;
}

SampleMatrix::SampleMatrix(FeatureDictionary dictionary, std::vector<std::uint8_t> cells,
                           std::vector<std::uint8_t> labels)
    : dictionary_(std::move(dictionary)), cells_(std::move(cells)), labels_(std::move(labels)) {
  const std::size_t n = n_features();
  const std::size_t rows = labels_.size();
  if (cells_.size() != rows * n) {
    throw ArgumentError("cell count " + std::to_string(cells_.size()) + " does not match " +
                        std::to_string(rows) + " rows x " + std::to_string(n) + " features");
  }
  for (std::uint8_t v : cells_) {
    if (v > 1) throw ArgumentError("matrix cells must be 0 or 1");
  }
  for (std::uint8_t v : labels_) {
    if (v > 1) throw ArgumentError("labels must be 0 (benign) or 1 (malware)");
  }

  row_words_ = (n + 63) / 64;
  column_words_ = (rows + 63) / 64;
  packed_rows_.assign(rows * row_words_, 0);
  packed_columns_.assign(n * column_words_, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!cells_[r * n + c]) continue;
      packed_rows_[r * row_words_ + c / 64] |= std::uint64_t{1} << (c % 64);
      packed_columns_[c * column_words_ + r / 64] |= std::uint64_t{1} << (r % 64);
    }
  }
  packed_labels_ = pack_bits(labels_);
}

std::array<std::size_t, 2> SampleMatrix::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (std::uint8_t l : labels_) ++counts[l];
  return counts;
}

bool SampleMatrix::has_both_classes() const {
  const auto c = class_counts();
  return c[0] > 0 && c[1] > 0;
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> rows) const {
  const std::size_t n = n_features();
  std::vector<std::uint8_t> cells;
  cells.reserve(rows.size() * n);
  std::vector<std::uint8_t> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n_rows()) throw ArgumentError("row index " + std::to_string(r) + " out of range");
    const auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return SampleMatrix(dictionary_, std::move(cells), std::move(labels));
}

SampleMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": missing header row");
  const auto header = SplitCommas(line);
  if (header.empty() || header.back() != kLabelColumn) {
    throw SchemaError(path.string() + ": last header column must be 'label'");
  }

  FeatureDictionary dictionary;
  std::vector<std::string> column_names;
  for (std::size_t c = 0; c + 1 < header.size(); ++c) {
    if (header[c].empty()) {
      throw SchemaError(path.string() + ": empty feature name in column " + std::to_string(c + 1));
    }
    auto entry = parse_header_name(header[c]);
    dictionary.add(std::move(entry.name), entry.category);
    column_names.emplace_back(header[c]);
  }
  const std::size_t n = dictionary.size();

  std::vector<std::uint8_t> cells;
  std::vector<std::uint8_t> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++row;
    const auto fields = SplitCommas(line);
    if (fields.size() != n + 1) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " cells, expected " +
                       std::to_string(n + 1));
    }
    for (std::size_t c = 0; c <= n; ++c) {
      const auto& f = fields[c];
      if (f != "0" && f != "1") {
        const std::string column = c < n ? column_names[c] : std::string(kLabelColumn);
        throw ParseError(path.string() + ": invalid cell '" + std::string(f) + "' at (row " +
                         std::to_string(row) + ", col " + column + ")");
      }
      const std::uint8_t v = f == "1" ? 1 : 0;
      if (c < n) {
        cells.push_back(v);
      } else {
        labels.push_back(v);
      }
    }
  }
  return SampleMatrix(std::move(dictionary), std::move(cells), std::move(labels));
}

void write_csv(const SampleMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : matrix.dictionary().entries()) {
    const auto name = header_name(e);
    if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos) {
      throw SchemaError("feature name '" + name + "' cannot be written to CSV");
    }
    out << name << ',';
  }
  out << kLabelColumn << '\n';
  std::string line;
  for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
    line.clear();
    for (std::uint8_t v : matrix.row(r)) {
      line.push_back(static_cast<char>('0' + v));
      line.push_back(',');
    }
    line.push_back(static_cast<char>('0' + matrix.label(r)));
    line.push_back('\n');
    out << line;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::size_t SplitPlan::parts() const {
  return std::holds_alternative<KFold>(kind) ? std::get<KFold>(kind).k : 2;
}

std::vector<std::size_t> SplitPlan::rows_in(std::size_t part) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] == part) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> SplitPlan::rows_out(std::size_t part) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] != part) out.push_back(r);
  }
  return out;
}

SplitPlan stratified_split(const SampleMatrix& matrix, const SplitKind& kind, std::uint64_t seed) {
  Rng rng(seed);
  auto by_class = RowsByClass(matrix);
  for (auto& rows : by_class) Shuffle(rows, rng);

  SplitPlan plan{kind, std::vector<std::size_t>(matrix.n_rows(), 0), seed};

  if (const auto* kfold = std::get_if<KFold>(&kind)) {
    const std::size_t k = kfold->k;
    if (k < 2) throw SplitError("kfold requires k >= 2");
    for (std::size_t c = 0; c < 2; ++c) {
      if (by_class[c].size() < k) {
        throw SplitError("kfold(" + std::to_string(k) + ") needs at least " + std::to_string(k) +
                         " rows of class " + std::to_string(c) + ", found " +
                         std::to_string(by_class[c].size()));
      }
    }
    // Round-robin that continues across classes keeps fold sizes balanced.
    std::size_t next = 0;
    for (const auto& rows : by_class) {
      for (std::size_t r : rows) {
        plan.assignment[r] = next;
        next = (next + 1) % k;
      }
    }
    return plan;
  }

  const double fraction = std::get<Holdout>(kind).fraction;
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("holdout fraction must lie in (0, 1)");
  }
  const auto total = static_cast<std::size_t>(std::llround(fraction * matrix.n_rows()));
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double ideal = fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<std::size_t>(std::floor(ideal));
    remainder[c] = ideal - std::floor(ideal);
    assigned += take[c];
  }
  while (assigned < total) {
    const std::size_t c = remainder[1] > remainder[0] ? 1 : 0;
    if (take[c] < by_class[c].size()) {
      ++take[c];
    } else {
      ++take[1 - c];
    }
    remainder[c] = -1.0;
    ++assigned;
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < take[c]; ++i) plan.assignment[by_class[c][i]] = 1;
  }
  return plan;
}

SampleMatrix generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.fidelity > 0.5 && spec.fidelity <= 1.0)) {
    throw SpecError("synthetic fidelity q must lie in (0.5, 1]");
  }
  if (spec.n_features == 0) throw SpecError("synthetic spec needs at least one feature");
  std::vector<std::uint8_t> informative(spec.n_features, 0);
  for (std::size_t i : spec.informative) {
    if (i >= spec.n_features) {
      throw SpecError("informative index " + std::to_string(i) + " out of range");
    }
    if (informative[i]) throw SpecError("duplicate informative index " + std::to_string(i));
    informative[i] = 1;
  }

  FeatureDictionary dictionary;
  for (std::size_t c = 0; c < spec.n_features; ++c) {
    dictionary.add("f" + std::to_string(c), FeatureCategory::Synthetic);
  }

  Rng rng(spec.seed);
  std::vector<std::uint8_t> cells(spec.n_samples * spec.n_features);
  std::vector<std::uint8_t> labels(spec.n_samples);
  for (std::size_t r = 0; r < spec.n_samples; ++r) {
    const std::uint8_t label = rng.bernoulli(0.5) ? 1 : 0;
    labels[r] = label;
    for (std::size_t c = 0; c < spec.n_features; ++c) {
      std::uint8_t bit;
      if (informative[c]) {
        bit = rng.bernoulli(spec.fidelity) ? label : static_cast<std::uint8_t>(1 - label);
      } else {
        bit = rng.bernoulli(0.5) ? 1 : 0;
      }
      cells[r * spec.n_features + c] = bit;
    }
  }
  return SampleMatrix(std::move(dictionary), std::move(cells), std::move(labels));
}

SampleMatrix project(const SampleMatrix& matrix, std::span<const std::size_t> subset) {
  const std::size_t n = matrix.n_features();
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= n) {
      throw ArgumentError("feature index " + std::to_string(subset[i]) + " out of range [0, " +
                          std::to_string(n) + ")");
    }
    if (i > 0 && subset[i] <= subset[i - 1]) {
      throw ArgumentError("subset indices must be strictly increasing (duplicate or unsorted at " +
                          std::to_string(subset[i]) + ")");
    }
  }
  FeatureDictionary dictionary;
  for (std::size_t c : subset) {
    dictionary.add(matrix.dictionary()[c].name, matrix.dictionary()[c].category);
  }
  std::vector<std::uint8_t> cells;
  cells.reserve(matrix.n_rows() * subset.size());
  for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
    const auto src = matrix.row(r);
    for (std::size_t c : subset) cells.push_back(src[c]);
  }
  return SampleMatrix(std::move(dictionary), std::move(cells),
                      std::vector<std::uint8_t>(matrix.labels().begin(), matrix.labels().end()));
}

}  // namespace rlfs
