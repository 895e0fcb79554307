#include "rlfs/config.hpp"

#include <fstream>

#include "rlfs/baselines.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {

RunConfig default_run_config() {
  RunConfig cfg;
  SyntheticSpec spec;
  spec.informative = random_subset(spec.n_features, 10, derive_seed(spec.seed, "informative"));
  cfg.dataset.synthetic = spec;
  return cfg;
}

void apply_paper_scale(RunConfig& cfg) {
  auto& a = cfg.agent;
  a.warmup_steps = 50000;
  a.capacity = 200000;
  a.batch_size = 32;
  a.gamma = 0.99;
  a.learning_rate = 3e-4;
  a.learn_frequency = 5;
  a.updates_per_learn = 1;
  a.sync_frequency = 100;
  cfg.paper_scale = true;
}

Json to_json(const RunConfig& cfg) {
  Json dataset = Json::object();
  if (cfg.dataset.csv) dataset["csv"] = cfg.dataset.csv->string();
  if (cfg.dataset.synthetic) dataset["synthetic"] = *cfg.dataset.synthetic;
  return Json{
      {"dataset", dataset},
      {"classifier", classifier_to_json(cfg.classifier)},
      {"network", cfg.network},
      {"agent", cfg.agent},
      {"seed", cfg.seed},
      {"out", cfg.out.string()},
      {"reward_holdout", cfg.reward_holdout},
      {"cv_folds", cfg.cv_folds},
      {"test_fraction", cfg.test_fraction},
      {"eval_episodes", cfg.eval_episodes},
      {"eval_epsilon", cfg.eval_epsilon},
      {"paper_scale", cfg.paper_scale},
  };
}

RunConfig run_config_from_json(const Json& j) {
  require_known_keys(j,
                     {"dataset", "classifier", "network", "agent", "seed", "out", "reward_holdout",
                      "cv_folds", "test_fraction", "eval_episodes", "eval_epsilon", "paper_scale"},
                     "config");
  RunConfig cfg = default_run_config();
  try {
    if (j.value("paper_scale", false)) apply_paper_scale(cfg);
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      require_known_keys(d, {"csv", "synthetic"}, "dataset");
      if (d.contains("csv") == d.contains("synthetic")) {
        throw ConfigError("dataset needs exactly one of csv or synthetic");
      }
      cfg.dataset = {};
      if (d.contains("csv")) cfg.dataset.csv = d.at("csv").get<std::string>();
      if (d.contains("synthetic")) cfg.dataset.synthetic = d.at("synthetic").get<SyntheticSpec>();
    }
    if (j.contains("classifier")) cfg.classifier = classifier_from_json(j.at("classifier"));
    if (j.contains("network")) {
      from_json(j.at("network"), cfg.network);
    }
    if (j.contains("agent")) from_json(j.at("agent"), cfg.agent);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    cfg.reward_holdout = j.value("reward_holdout", cfg.reward_holdout);
    cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
    cfg.eval_episodes = j.value("eval_episodes", cfg.eval_episodes);
    cfg.eval_epsilon = j.value("eval_epsilon", cfg.eval_epsilon);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(cfg.reward_holdout > 0.0 && cfg.reward_holdout < 1.0)) {
    throw ConfigError("reward_holdout must lie in (0, 1)");
  }
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  if (cfg.cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
  if (cfg.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (!(cfg.eval_epsilon >= 0.0 && cfg.eval_epsilon <= 1.0)) {
    throw ConfigError("eval_epsilon must lie in [0, 1]");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return run_config_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

SampleMatrix load_dataset(const RunConfig& cfg) {
  if (cfg.dataset.csv) return load_csv(*cfg.dataset.csv);
  if (cfg.dataset.synthetic) return generate_synthetic(*cfg.dataset.synthetic);
  throw ConfigError("no dataset configured");
}

}  // namespace rlfs
