#include "rlfs/featurize.hpp"

#include <algorithm>
#include <fstream>
#include <cctype>

#include "rlfs/error.hpp"

namespace rlfs {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(std::move(line));
  return out;
}

}  // namespace

OpcodeAlphabetMap OpcodeAlphabetMap::dalvik() {
  OpcodeAlphabetMap map;
  const std::pair<char, std::vector<std::string>> listed[] = {
      {'M',
       {"move", "move/from16", "move/16", "move-wide", "move-wide/from16", "move-result",
        "move-wide/16", "move-object", "move-object/from16", "move-object/16"}},
      {'R', {"return-void", "return", "return-wide", "return-object"}},
      {'G', {"goto", "goto/16", "goto/32"}},
      {'I',
       {"if-eq", "if-ne", "if-lt", "if-ge", "if-gt", "if-le", "if-eqz", "if-nez", "if-ltz",
        "if-gez", "if-gtz", "if-lez"}},
      {'T',
       {"aget", "aget-wide", "aget-object", "aget-boolean", "aget-byte", "aget-char",
        "aget-short", "iget", "iget-wide", "iget-object", "iget-boolean", "iget-byte",
        "iget-char"}},
      {'P',
       {"aput", "aput-wide", "aput-object", "aput-boolean", "aput-byte", "aput-char",
        "aput-short", "iput", "iput-wide", "iput-object", "iput-boolean", "iput-byte",
        "iput-char"}},
      {'V',
       {"invoke-virtual", "invoke-super", "invoke-direct", "invoke-static", "invoke-interface",
        "invoke-virtual/range", "invoke-super/range", "invoke-direct/range"}},
  };
  for (const auto& [letter, mnemonics] : listed) {
    for (const auto& m : mnemonics) map.add_exact(m, letter);
  }
  // Families whose listings are open-ended.
  map.add_prefix("move", 'M');
  map.add_prefix("return", 'R');
  map.add_prefix("goto", 'G');
  map.add_prefix("if-", 'I');
  map.add_prefix("aget", 'T');
  map.add_prefix("iget", 'T');
  map.add_prefix("sget", 'T');
  map.add_prefix("aput", 'P');
  map.add_prefix("iput", 'P');
  map.add_prefix("sput", 'P');
  map.add_prefix("invoke-", 'V');
  return map;
}

void OpcodeAlphabetMap::add_exact(std::string mnemonic, char letter) {
  rules_.push_back({std::move(mnemonic), letter, false});
}

void OpcodeAlphabetMap::add_prefix(std::string prefix, char letter) {
  rules_.push_back({std::move(prefix), letter, true});
}

std::optional<char> OpcodeAlphabetMap::lookup(std::string_view mnemonic) const {
  for (const auto& rule : rules_) {
    if (!rule.prefix && rule.pattern == mnemonic) return rule.letter;
  }
  const Rule* best = nullptr;
  for (const auto& rule : rules_) {
    if (rule.prefix && mnemonic.starts_with(rule.pattern) &&
        (best == nullptr || rule.pattern.size() > best->pattern.size())) {
      best = &rule;
    }
  }
  if (best) return best->letter;
  return std::nullopt;
}

std::string map_dalvik_to_letters(std::span<const std::string> mnemonics,
                                  const OpcodeAlphabetMap& map) {
  std::string out;
  out.reserve(mnemonics.size());
  for (const auto& m : mnemonics) {
    if (auto letter = map.lookup(m)) out.push_back(*letter);
  }
  return out;
}

GramCounts extract_ngrams(std::string_view letters, int n) {
  if (n <= 0) throw ArgumentError("n-gram length must be >= 1, got " + std::to_string(n));
  GramCounts counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= letters.size(); ++i) {
    ++counts[std::string(letters.substr(i, len))];
  }
  return counts;
}

NGramVocabulary build_vocabulary(std::span<const std::string> corpora, int n, std::size_t k) {
  if (k == 0) throw ArgumentError("vocabulary size k must be >= 1");
  GramCounts total;
  for (const auto& corpus : corpora) {
    for (const auto& [gram, count] : extract_ngrams(corpus, n)) total[gram] += count;
  }
  if (total.size() < k) {
    throw VocabularyError("requested " + std::to_string(k) + " grams but only " +
                          std::to_string(total.size()) + " distinct " + std::to_string(n) +
                          "-grams exist (short by " + std::to_string(k - total.size()) + ")");
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(total.begin(), total.end());
  // total is a std::map, so ranked is already lexicographic; stable_sort keeps
  // that order among equal counts.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  NGramVocabulary vocab;
  vocab.n = n;
  vocab.source = "top-" + std::to_string(k) + " " + std::to_string(n) + "-grams over " +
                 std::to_string(corpora.size()) + " malware corpora";
  for (std::size_t i = 0; i < k; ++i) vocab.grams.push_back(ranked[i].first);
  return vocab;
}

std::vector<std::uint8_t> vectorize_ngrams(std::string_view letters, const NGramVocabulary& vocab) {
  const auto present = extract_ngrams(letters, vocab.n);
  std::vector<std::uint8_t> bits(vocab.grams.size(), 0);
  for (std::size_t i = 0; i < vocab.grams.size(); ++i) {
    bits[i] = present.contains(vocab.grams[i]) ? 1 : 0;
  }
  return bits;
}

DeclaredVector vectorize_declared(std::span<const std::string> names,
                                  const FeatureDictionary& dictionary, FeatureCategory category) {
  const auto positions = dictionary.indices_of(category);
  DeclaredVector out;
  out.bits.assign(positions.size(), 0);
  for (const auto& name : names) {
    bool known = false;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (dictionary[positions[i]].name == name) {
        out.bits[i] = 1;
        known = true;
        break;
      }
    }
    if (!known) ++out.unknown;
  }
  return out;
}

std::vector<std::string> read_mnemonic_file(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& raw : ReadLines(path)) {
    const auto line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == '.' || line.front() == ':') continue;
    const auto end = line.find_first_of(" \t");
    out.emplace_back(line.substr(0, end));
  }
  return out;
}

std::vector<std::string> read_names_file(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& raw : ReadLines(path)) {
    const auto line = Trim(raw);
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

}  // namespace rlfs
