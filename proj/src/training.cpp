#include "rlfs/training.hpp"

#include <chrono>
#include <string>

#include "rlfs/agent.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

EpisodeRecord RunEpisode(Environment& env, ReplayMemory& memory, double eps,
                         const NetworkParams& online, Rng& rng) {
  EpisodeRecord record;
  record.epsilon = eps;
  EpisodeState state = env.reset();
  bool done = false;
  while (!done) {
    const std::uint32_t action = select_action(state, eps, online, rng);
    auto result = env.step(state, action);
    Transition t{state, action, result.reward, result.state, result.done};
    check_transition(t);
    memory.push(std::move(t));
    record.step_rewards.push_back(result.reward);
    state = std::move(result.state);
    done = result.done;
  }
  record.final_reward = record.step_rewards.back();
  return record;
}

}  // namespace

std::vector<std::uint32_t> rollout(const NetworkParams& online, std::size_t features, double eps,
                                   Rng& rng) {
  EpisodeState state;
  std::vector<std::uint32_t> order;
  for (std::size_t f = 0; f < features; ++f) {
    const auto action = select_action(state, eps, online, rng);
    order.push_back(action);
    state = state.with(action);
  }
  return order;
}

TrainingResult train_agent(const SampleMatrix& data, const RunConfig& cfg,
                           const EpisodeObserver& observer) {
  const AgentConfig& agent = cfg.agent;
  agent.validate(data.n_features());
  NetworkConfig net_cfg = cfg.network;
  net_cfg.n_features = data.n_features();

  RewardOracle oracle(data, cfg.classifier, derive_seed(cfg.seed, "reward"), cfg.reward_holdout);
  Environment env(oracle, agent.features);
  ReplayMemory memory(agent.capacity);
  Rng rng(derive_seed(cfg.seed, "agent"));
  Rng learn_rng(derive_seed(cfg.seed, "replay"));

  NetworkParams online = init(net_cfg, derive_seed(cfg.seed, "init"));
  NetworkParams target(net_cfg);
  sync(online, target);
  OptimizerState opt{0, agent.learning_rate, agent.total_updates(), agent.clip_norm};

  TrainingResult result;

  auto start = Clock::now();
  while (memory.inserted() < agent.warmup_steps) {
    RunEpisode(env, memory, 1.0, online, rng);
  }
  result.warmup_transitions = memory.inserted();
  result.timings.warmup_seconds = Seconds(start);

  start = Clock::now();
  const EpsilonSchedule schedule{agent.episodes, agent.p};
  auto learn = [&](std::size_t episode) {
    if (memory.size() < agent.batch_size) return;
    for (std::size_t u = 0; u < agent.updates_per_learn; ++u) {
      train_step(memory, online, target, opt, agent, learn_rng);
      ++result.updates;
    }
    if (!online.all_finite()) {
      throw Error("online network diverged (non-finite parameters) after episode " +
                  std::to_string(episode));
    }
  };
  double eps = schedule.at(0);
  for (std::size_t episode = 1; episode <= agent.episodes; ++episode) {
    EpisodeRecord record;
    try {
      record = RunEpisode(env, memory, eps, online, rng);
    } catch (const Error& e) {
      throw Error("episode " + std::to_string(episode) + ": " + e.what());
    }
    record.episode = episode;
    if (episode % agent.learn_frequency == 0) learn(episode);
    if (episode % agent.sync_frequency == 0) {
      learn(episode);
      sync(online, target);
    }
    eps = schedule.at(episode);
    if (observer) observer(record, online);
    result.episodes.push_back(std::move(record));
  }
  result.timings.training_seconds = Seconds(start);

  start = Clock::now();
  Rng greedy_rng(derive_seed(cfg.seed, "evaluation"));
  result.selection_order = rollout(online, agent.features, 0.0, greedy_rng);
  result.optimal = EpisodeState::from_unordered(result.selection_order);
  result.final_reward = oracle(result.optimal);
  result.timings.evaluation_seconds = Seconds(start);

  result.oracle_fits = oracle.fits();
  result.oracle_cache_hits = oracle.cache_hits();
  result.checkpoint = Checkpoint{std::move(online), std::move(target), opt};
  return result;
}

}  // namespace rlfs
