#include "rlfs/agent.hpp"

#include <cmath>
#include <string>

#include "rlfs/error.hpp"

namespace rlfs {

double EpsilonSchedule::at(std::size_t episode) const {
  if (episode > total_episodes) {
    throw ArgumentError("episode " + std::to_string(episode) + " exceeds schedule length " +
                        std::to_string(total_episodes));
  }
  return 1.0 - (static_cast<double>(episode) / static_cast<double>(total_episodes)) * p;
}

void check_transition(const Transition& t) {
  if (t.next_state.size() != t.prev_state.size() + 1 || t.prev_state.contains(t.action) ||
      !(t.prev_state.with(t.action) == t.next_state)) {
    throw ArgumentError("transition next_state must equal prev_state plus the action");
  }
}

ReplayMemory::ReplayMemory(std::size_t capacity) {
  if (capacity == 0) throw ArgumentError("replay memory capacity must be >= 1");
  buffer_.resize(capacity);
}

void ReplayMemory::push(Transition t) {
  buffer_[head_] = std::move(t);
  head_ = (head_ + 1) % buffer_.size();
  if (size_ < buffer_.size()) ++size_;
  ++inserted_;
}

const Transition& ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw ArgumentError("replay index out of range");
  const std::size_t oldest = (head_ + buffer_.size() - size_) % buffer_.size();
  return buffer_[(oldest + i) % buffer_.size()];
}

std::vector<Transition> ReplayMemory::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ < batch_size || size_ == 0) {
    throw ArgumentError("cannot sample " + std::to_string(batch_size) + " transitions from a memory of " +
                        std::to_string(size_));
  }
  std::vector<Transition> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) out.push_back(at(rng.uniform_index(size_)));
  return out;
}

std::string_view convention_name(DdqnConvention c) {
  return c == DdqnConvention::Paper ? "paper" : "standard";
}

DdqnConvention convention_from_name(std::string_view name) {
  if (name == "paper") return DdqnConvention::Paper;
  if (name == "standard") return DdqnConvention::Standard;
  throw ArgumentError("unknown ddqn convention '" + std::string(name) + "'");
}

void AgentConfig::validate(std::size_t n_features) const {
  if (features < 1 || features > n_features) {
    throw ArgumentError("features to select must lie in 1.." + std::to_string(n_features));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must lie in [0, 1]");
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("epsilon factor p must lie in (0, 1]");
  if (episodes < 1 || warmup_steps < 1 || capacity < 1 || batch_size < 1 || learn_frequency < 1 ||
      sync_frequency < 1 || updates_per_learn < 1) {
    throw ArgumentError("agent counts must all be >= 1");
  }
  if (!(learning_rate >= 0.0)) throw ArgumentError("learning rate must be >= 0");
}

std::size_t AgentConfig::warmup_episodes() const { return (warmup_steps + features - 1) / features; }

std::size_t AgentConfig::total_updates() const {
  std::size_t events = 0;
  for (std::size_t e = 1; e <= episodes; ++e) {
    if (e % learn_frequency == 0) ++events;
    if (e % sync_frequency == 0) ++events;
  }
  return events * updates_per_learn;
}

std::uint32_t greedy_action(std::span<const double> scores, const EpisodeState& state) {
  if (state.size() >= scores.size()) throw ArgumentError("no unselected feature remains");
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto feature = static_cast<std::uint32_t>(i + 1);
    if (state.contains(feature)) continue;
    if (best == scores.size() || scores[i] > scores[best]) best = i;
  }
  return static_cast<std::uint32_t>(best + 1);
}

std::uint32_t select_action(const EpisodeState& state, double eps, const NetworkParams& online,
                            Rng& rng) {
  const std::size_t n = online.config().n_features;
  if (state.size() >= n) throw ArgumentError("state already holds every feature");
  if (rng.uniform01() < eps) {
    // k-th unselected feature
    std::size_t k = rng.uniform_index(n - state.size());
    for (std::uint32_t f = 1; f <= n; ++f) {
      if (state.contains(f)) continue;
      if (k-- == 0) return f;
    }
  }
  return greedy_action(forward(online, state), state);
}

double ddqn_target(const Transition& t, const QFunction& online, const QFunction& target,
                   double gamma, DdqnConvention convention) {
  if (t.terminal) return t.reward;
  const auto& chooser = convention == DdqnConvention::Paper ? target : online;
  const auto& evaluator = convention == DdqnConvention::Paper ? online : target;
  const auto best = greedy_action(chooser(t.next_state), t.next_state);
  return t.reward + gamma * evaluator(t.next_state)[best - 1];
}

double ddqn_target(const Transition& t, const NetworkParams& online, const NetworkParams& target,
                   double gamma, DdqnConvention convention) {
  if (!(online.config() == target.config())) {
    throw ArgumentError("online and target networks must share a config");
  }
  return ddqn_target(
      t, [&](const EpisodeState& s) { return forward(online, s); },
      [&](const EpisodeState& s) { return forward(target, s); }, gamma, convention);
}

double train_step(const ReplayMemory& memory, NetworkParams& online, const NetworkParams& target,
                  OptimizerState& opt, const AgentConfig& cfg, Rng& rng) {
  const auto batch = memory.sample(cfg.batch_size, rng);
  NetworkParams grads(online.config());
  double loss = 0.0;
  for (const auto& t : batch) {
    const double y = ddqn_target(t, online, target, cfg.gamma, cfg.convention);
    loss += accumulate_backward(online, t.prev_state, t.action, y, grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grads.values()) g *= inv;
  step(online, grads, opt);
  return loss * inv;
}

}  // namespace rlfs
