#include "rlfs/state.hpp"

#include <algorithm>
#include <string>

#include "rlfs/error.hpp"

namespace rlfs {

EpisodeState EpisodeState::from_sorted(std::vector<std::uint32_t> indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] == 0) throw ArgumentError("state indices are 1-based; 0 is reserved");
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw ArgumentError("state must be strictly increasing (found " + std::to_string(indices[i]) +
                          " after " + std::to_string(indices[i - 1]) + ")");
    }
  }
  EpisodeState s;
  s.items_ = std::move(indices);
  return s;
}

EpisodeState EpisodeState::from_unordered(std::vector<std::uint32_t> indices) {
  std::sort(indices.begin(), indices.end());
  return from_sorted(std::move(indices));
}

EpisodeState EpisodeState::with(std::uint32_t feature) const {
  if (feature == 0) throw ArgumentError("feature indices are 1-based; 0 is reserved");
  const auto pos = std::lower_bound(items_.begin(), items_.end(), feature);
  if (pos != items_.end() && *pos == feature) {
    throw ArgumentError("feature " + std::to_string(feature) + " is already selected");
  }
  EpisodeState next;
  next.items_.reserve(items_.size() + 1);
  next.items_.insert(next.items_.end(), items_.begin(), pos);
  next.items_.push_back(feature);
  next.items_.insert(next.items_.end(), pos, items_.end());
  return next;
}

bool EpisodeState::contains(std::uint32_t feature) const {
  return std::binary_search(items_.begin(), items_.end(), feature);
}

std::vector<std::size_t> EpisodeState::columns() const {
  std::vector<std::size_t> out;
  out.reserve(items_.size());
  for (auto f : items_) out.push_back(f - 1);
  return out;
}

}  // namespace rlfs
