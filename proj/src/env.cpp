#include "rlfs/env.hpp"

#include <string>

#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {

RewardOracle::RewardOracle(const SampleMatrix& data, ClassifierKind kind, std::uint64_t seed,
                           double score_fraction, bool cache)
    : kind_(std::move(kind)), fit_seed_(derive_seed(seed, "reward_fit")), cache_enabled_(cache) {
  validate(kind_);
  const auto plan = stratified_split(data, Holdout{score_fraction}, derive_seed(seed, "reward_split"));
  fit_ = data.select_rows(plan.rows_in(0));
  score_ = data.select_rows(plan.rows_in(1));
}

double RewardOracle::operator()(const EpisodeState& state) {
  for (auto f : state.items()) {
    if (f > n_features()) {
      throw ArgumentError("feature " + std::to_string(f) + " outside 1.." +
                          std::to_string(n_features()));
    }
  }
  const auto columns = state.columns();
  return evaluate(columns);
}

double RewardOracle::evaluate(std::span<const std::size_t> columns) {
  if (columns.empty()) throw ArgumentError("reward of an empty subset is undefined");
  std::vector<std::size_t> key(columns.begin(), columns.end());
  if (cache_enabled_) {
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  const auto clf = fit(kind_, project(fit_, key), fit_seed_);
  const double reward = accuracy(clf, project(score_, key));
  ++fits_;
  if (cache_enabled_) cache_.emplace(std::move(key), reward);
  return reward;
}

Environment::Environment(RewardOracle& oracle, std::size_t features_per_episode)
    : oracle_(&oracle), features_(features_per_episode) {
  if (features_ < 1 || features_ > oracle.n_features()) {
    throw ArgumentError("features per episode must lie in 1.." + std::to_string(oracle.n_features()));
  }
}

StepResult Environment::step(const EpisodeState& state, std::uint32_t action) {
  if (state.size() >= features_) {
    throw ArgumentError("episode already holds " + std::to_string(features_) + " features");
  }
  if (action < 1 || action > n_features()) {
    throw ArgumentError("action " + std::to_string(action) + " outside 1.." +
                        std::to_string(n_features()));
  }
  if (state.contains(action)) {
    throw ArgumentError("feature " + std::to_string(action) + " is already selected");
  }
  StepResult result;
  result.state = state.with(action);
  result.reward = (*oracle_)(result.state);
  result.done = result.state.size() == features_;
  return result;
}

}  // namespace rlfs
