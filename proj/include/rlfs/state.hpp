#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rlfs {

// The agent's observation: the selected features as a strictly increasing
// list of 1-based indices. Sortedness makes every selection order of the
// same set produce the same network input.
class EpisodeState {
 public:
  EpisodeState() = default;

  // Throws ArgumentError unless indices are >= 1 and strictly increasing.
  static EpisodeState from_sorted(std::vector<std::uint32_t> indices);
  // Sorts; throws ArgumentError on duplicates or index 0.
  static EpisodeState from_unordered(std::vector<std::uint32_t> indices);

  // Sorted insert; throws ArgumentError if already present.
  EpisodeState with(std::uint32_t feature) const;
  bool contains(std::uint32_t feature) const;

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::span<const std::uint32_t> items() const { return items_; }
  // 0-based dataset column indices.
  std::vector<std::size_t> columns() const;

  bool operator==(const EpisodeState&) const = default;
  auto operator<=>(const EpisodeState&) const = default;

 private:
  std::vector<std::uint32_t> items_;
};

}  // namespace rlfs
