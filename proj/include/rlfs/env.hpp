#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rlfs/classifiers.hpp"
#include "rlfs/dataset.hpp"
#include "rlfs/state.hpp"

namespace rlfs {

// Wrapper reward: accuracy of a classifier fitted on the subset-projected fit
// partition and scored on the subset-projected score partition. The two
// partitions are a stratified holdout drawn once at construction.
class RewardOracle {
 public:
  RewardOracle(const SampleMatrix& data, ClassifierKind kind, std::uint64_t seed,
               double score_fraction = 0.2, bool cache = true);

  double operator()(const EpisodeState& state);
  // 0-based, strictly increasing, nonempty.
  double evaluate(std::span<const std::size_t> columns);

  std::size_t n_features() const { return fit_.n_features(); }
  std::size_t fits() const { return fits_; }
  std::size_t cache_hits() const { return hits_; }
  const SampleMatrix& fit_partition() const { return fit_; }
  const SampleMatrix& score_partition() const { return score_; }

 private:
  SampleMatrix fit_;
  SampleMatrix score_;
  ClassifierKind kind_;
  std::uint64_t fit_seed_;
  bool cache_enabled_;
  std::map<std::vector<std::size_t>, double> cache_;
  std::size_t fits_ = 0;
  std::size_t hits_ = 0;
};

struct StepResult {
  EpisodeState state;
  double reward = 0.0;
  bool done = false;
};

// Episode mechanics: a sorted selection that terminates after F picks.
class Environment {
 public:
  Environment(RewardOracle& oracle, std::size_t features_per_episode);

  EpisodeState reset() const { return {}; }
  StepResult step(const EpisodeState& state, std::uint32_t action);

  std::size_t n_features() const { return oracle_->n_features(); }
  std::size_t features_per_episode() const { return features_; }
  RewardOracle& oracle() { return *oracle_; }

 private:
  RewardOracle* oracle_;
  std::size_t features_;
};

}  // namespace rlfs
