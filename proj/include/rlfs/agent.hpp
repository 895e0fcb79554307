#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "rlfs/net.hpp"
#include "rlfs/rng.hpp"
#include "rlfs/state.hpp"

namespace rlfs {

// epsilon(episode) = 1 - (episode / E) * p
struct EpsilonSchedule {
  std::size_t total_episodes = 1;
  double p = 0.9;

  double at(std::size_t episode) const;
};

struct Transition {
  EpisodeState prev_state;
  std::uint32_t action = 0;  // 1-based feature index
  double reward = 0.0;
  EpisodeState next_state;
  bool terminal = false;
};

// Throws ArgumentError unless next_state == prev_state + {action}.
void check_transition(const Transition& t);

// Bounded FIFO of transitions; sampling is uniform with replacement.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buffer_.size(); }
  std::uint64_t inserted() const { return inserted_; }
  // 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

 private:
  std::vector<Transition> buffer_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::uint64_t inserted_ = 0;
};

// paper: argmax with the target network, evaluate with the online network.
// standard: argmax with the online network, evaluate with the target network.
enum class DdqnConvention { Paper, Standard };

std::string_view convention_name(DdqnConvention c);
DdqnConvention convention_from_name(std::string_view name);

// Defaults are desk scale: short runs need a larger warm-up, a shorter
// horizon and many more updates per episode than the published schedule to
// learn within E = 300 episodes. apply_paper_scale restores the latter.
struct AgentConfig {
  std::size_t features = 10;          // F: selections per episode
  std::size_t episodes = 300;         // E
  double p = 0.9;                     // exploration decay factor
  std::size_t warmup_steps = 10000;   // transitions from uniform-random episodes
  std::size_t capacity = 20000;       // replay memory size
  std::size_t batch_size = 32;
  double gamma = 0.2;
  std::size_t learn_frequency = 1;    // episodes between learning events
  std::size_t sync_frequency = 20;    // episodes between target syncs
  std::size_t updates_per_learn = 20; // optimizer steps per learning event
  double learning_rate = 0.05;
  double clip_norm = 5.0;
  DdqnConvention convention = DdqnConvention::Paper;

  void validate(std::size_t n_features) const;
  // ceil(warmup_steps / F)
  std::size_t warmup_episodes() const;
  // Optimizer steps a full run performs; the learning-rate decay horizon.
  std::size_t total_updates() const;

  bool operator==(const AgentConfig&) const = default;
};

// Highest-scoring feature not in state (scores[i] belongs to feature i+1);
// equal scores go to the lower index.
std::uint32_t greedy_action(std::span<const double> scores, const EpisodeState& state);

// With probability eps a uniform draw over unselected features, otherwise
// greedy_action over the online network's scores.
std::uint32_t select_action(const EpisodeState& state, double eps, const NetworkParams& online,
                            Rng& rng);

using QFunction = std::function<std::vector<double>(const EpisodeState&)>;

double ddqn_target(const Transition& t, const QFunction& online, const QFunction& target,
                   double gamma, DdqnConvention convention = DdqnConvention::Paper);
double ddqn_target(const Transition& t, const NetworkParams& online, const NetworkParams& target,
                   double gamma, DdqnConvention convention = DdqnConvention::Paper);

// One optimizer step on a sampled batch using the mean gradient of
// 0.5 * (Q(prev_state)[action] - target)^2. Returns the mean loss.
double train_step(const ReplayMemory& memory, NetworkParams& online, const NetworkParams& target,
                  OptimizerState& opt, const AgentConfig& cfg, Rng& rng);

}  // namespace rlfs
