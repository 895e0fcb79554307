#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlfs/dataset.hpp"

namespace rlfs {

// Dalvik mnemonic -> opcode letter in {M,R,G,I,T,P,V}. Exact rules take
// precedence over prefix rules; among prefix rules the longest match wins.
// Mnemonics matching no rule have no letter and are dropped.
class OpcodeAlphabetMap {
 public:
  struct Rule {
    std::string pattern;
    char letter;
    bool prefix;
  };

  // The instruction grouping used for malware opcode features (move, return,
  // goto, if, get, put and invoke families).
  static OpcodeAlphabetMap dalvik();

  void add_exact(std::string mnemonic, char letter);
  void add_prefix(std::string prefix, char letter);

  std::optional<char> lookup(std::string_view mnemonic) const;
  std::span<const Rule> rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

inline constexpr std::string_view kOpcodeAlphabet = "MRGITPV";

std::string map_dalvik_to_letters(std::span<const std::string> mnemonics,
                                  const OpcodeAlphabetMap& map);

using GramCounts = std::map<std::string, std::size_t>;

GramCounts extract_ngrams(std::string_view letters, int n);

struct NGramVocabulary {
  int n = 0;
  std::vector<std::string> grams;
  std::string source;
};

// Top-k grams by total frequency over the corpora; equal frequencies are
// ordered lexicographically.
NGramVocabulary build_vocabulary(std::span<const std::string> corpora, int n, std::size_t k);

std::vector<std::uint8_t> vectorize_ngrams(std::string_view letters, const NGramVocabulary& vocab);

struct DeclaredVector {
  // One bit per dictionary entry of the category, in dictionary order.
  std::vector<std::uint8_t> bits;
  std::size_t unknown = 0;
};

DeclaredVector vectorize_declared(std::span<const std::string> names,
                                  const FeatureDictionary& dictionary, FeatureCategory category);

// One mnemonic per line; for full smali lines only the leading token is
// kept. Blank lines and '#' / '.' directives are skipped.
std::vector<std::string> read_mnemonic_file(const std::filesystem::path& path);

// One name per line, trimmed; blank lines skipped.
std::vector<std::string> read_names_file(const std::filesystem::path& path);

}  // namespace rlfs
