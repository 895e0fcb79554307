#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "rlfs/agent.hpp"
#include "rlfs/classifiers.hpp"
#include "rlfs/dataset.hpp"
#include "rlfs/json.hpp"
#include "rlfs/net.hpp"

namespace rlfs {

struct DatasetSource {
  std::optional<std::filesystem::path> csv;
  std::optional<SyntheticSpec> synthetic;
};

// Everything a command needs. Defaults are desk scale; apply_paper_scale
// restores the published hyperparameters.
struct RunConfig {
  DatasetSource dataset;
  ClassifierKind classifier = DecisionTreeParams{};
  NetworkConfig network;  // n_features is taken from the dataset
  AgentConfig agent;
  std::uint64_t seed = 1;
  std::filesystem::path out = "rlfs-out";
  double reward_holdout = 0.2;  // score share of the reward oracle split
  std::size_t cv_folds = 10;
  double test_fraction = 0.2;   // learning-curve test partition
  std::size_t eval_episodes = 5;
  double eval_epsilon = 0.05;
  bool paper_scale = false;
};

RunConfig default_run_config();
void apply_paper_scale(RunConfig& cfg);

Json to_json(const RunConfig& cfg);
// Missing keys keep their defaults. Throws ConfigError.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

SampleMatrix load_dataset(const RunConfig& cfg);

}  // namespace rlfs
