#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rlfs/config.hpp"
#include "rlfs/env.hpp"
#include "rlfs/net.hpp"

namespace rlfs {

struct EpisodeRecord {
  std::size_t episode = 0;  // 1-based
  double epsilon = 0.0;
  double final_reward = 0.0;
  std::vector<double> step_rewards;
};

struct Timings {
  double warmup_seconds = 0.0;
  double training_seconds = 0.0;
  double evaluation_seconds = 0.0;
};

struct TrainingResult {
  std::vector<EpisodeRecord> episodes;
  EpisodeState optimal;
  std::vector<std::uint32_t> selection_order;  // greedy picks in the order made
  double final_reward = 0.0;
  Checkpoint checkpoint;
  std::size_t warmup_transitions = 0;
  std::size_t updates = 0;
  std::size_t oracle_fits = 0;
  std::size_t oracle_cache_hits = 0;
  Timings timings;
};

// Called after every training episode with the current online network.
using EpisodeObserver = std::function<void(const EpisodeRecord&, const NetworkParams& online)>;

// Warm-up with uniform-random episodes, E epsilon-greedy training episodes
// with periodic learning and target syncs, then one greedy evaluation
// episode.
TrainingResult train_agent(const SampleMatrix& data, const RunConfig& cfg,
                           const EpisodeObserver& observer = {});

// Greedy (or epsilon-perturbed) selection of F features by the network
// alone; returns the picks in selection order.
std::vector<std::uint32_t> rollout(const NetworkParams& online, std::size_t features, double eps,
                                   Rng& rng);

}  // namespace rlfs
