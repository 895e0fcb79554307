#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "rlfs/agent.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

#include "oracles.hpp"

using namespace rlfs;

namespace {

Transition Make(std::vector<std::uint32_t> prev, std::uint32_t action, double reward, bool terminal) {
  const auto p = EpisodeState::from_sorted(std::move(prev));
  return {p, action, reward, p.with(action), terminal};
}

QFunction Table(std::vector<double> scores) {
  return [scores](const EpisodeState&) { return scores; };
}

// Tags transitions by reward so eviction order is observable.
Transition Tagged(int tag) { return Make({}, 1, tag, false); }

}  // namespace

TEST_CASE("epsilon schedule") {
  CHECK(EpsilonSchedule{300, 0.9}.at(0) == 1.0);
  CHECK(EpsilonSchedule{300, 0.9}.at(300) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(EpsilonSchedule{1000, 0.8}.at(500) - 0.6) < 1e-12);
  CHECK_THROWS_AS((EpsilonSchedule{10, 0.9}.at(11)), ArgumentError);
  const EpsilonSchedule s{77, 0.65};
  for (std::size_t e = 1; e <= 77; ++e) {
    CHECK(s.at(e) <= s.at(e - 1));
    CHECK(s.at(e) >= 1.0 - 0.65 - 1e-12);
  }
}

TEST_CASE("greedy selection skips selected features") {
  const std::vector<double> scores{0.2, 0.9, 0.5};
  CHECK(greedy_action(scores, {}) == 2);
  CHECK(greedy_action(scores, EpisodeState::from_sorted({2})) == 3);
  CHECK(greedy_action(scores, EpisodeState::from_sorted({2, 3})) == 1);
  const std::vector<double> ties{0.5, 0.7, 0.7};
  CHECK(greedy_action(ties, {}) == 2);

  Rng rng(1);
  const auto net = oracle::constant_scores(scores);
  CHECK(select_action({}, 0.0, net, rng) == 2);
  CHECK(select_action(EpisodeState::from_sorted({2}), 0.0, net, rng) == 3);
  CHECK_THROWS(select_action(EpisodeState::from_sorted({1, 2, 3}), 0.0, net, rng));
}

TEST_CASE("selection never returns a member of the state") {
  Rng rng(2);
  const auto net = oracle::constant_scores({0.3, 0.1, 0.9, 0.9, 0.2, 0.8});
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    if (std::popcount(mask) > 3) continue;
    std::vector<std::uint32_t> items;
    for (std::uint32_t f = 0; f < 6; ++f) {
      if (mask >> f & 1) items.push_back(f + 1);
    }
    const auto state = EpisodeState::from_sorted(items);
    for (double eps : {0.0, 1.0}) {
      for (int rep = 0; rep < 20; ++rep) CHECK_FALSE(state.contains(select_action(state, eps, net, rng)));
    }
  }
}

TEST_CASE("random selection is uniform over unselected features") {
  Rng rng(3);
  const auto net = oracle::constant_scores(std::vector<double>(8, 0.0));
  const auto state = EpisodeState::from_sorted({2, 5, 7});
  std::map<std::uint32_t, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[select_action(state, 1.0, net, rng)];
  CHECK(counts.size() == 5);
  const double p = 1.0 / 5.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (auto [f, c] : counts) {
    CHECK_FALSE(state.contains(f));
    CHECK(std::abs(c - draws * p) <= 3 * sigma);
  }
}

TEST_CASE("replay memory evicts oldest first") {
  ReplayMemory m(2);
  m.push(Tagged(1));
  m.push(Tagged(2));
  m.push(Tagged(3));
  REQUIRE(m.size() == 2);
  CHECK(m.at(0).reward == 2);
  CHECK(m.at(1).reward == 3);
  CHECK(m.inserted() == 3);
  Rng rng(1);
  CHECK_THROWS(m.sample(3, rng));
}

TEST_CASE("replay sampling is uniform") {
  ReplayMemory m(10);
  for (int i = 0; i < 13; ++i) m.push(Tagged(i));
  Rng rng(4);
  std::map<int, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws / 10; ++i) {
    for (const auto& t : m.sample(10, rng)) ++counts[static_cast<int>(t.reward)];
  }
  REQUIRE(counts.size() == 10);
  const double p = 0.1;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (auto [tag, c] : counts) {
    CHECK(tag >= 3);
    CHECK(std::abs(c - draws * p) <= 3 * sigma);
  }
}

TEST_CASE("transition invariant is enforced") {
  CHECK_NOTHROW(check_transition(Make({1, 4}, 2, 0.5, false)));
  Transition bad = Make({1}, 2, 0.5, false);
  bad.next_state = EpisodeState::from_sorted({1, 3});
  CHECK_THROWS(check_transition(bad));
}

TEST_CASE("ddqn target hand values") {
  const auto online = Table({9.0, 0.4, 7.0});
  const auto target = Table({0.1, 0.5, 0.3});
  const auto t = Make({}, 1, 0.9, false);
  // next_state = {1}; argmax of the target table over {2, 3} is 2.
  CHECK(ddqn_target(t, online, target, 0.99) == 0.9 + 0.99 * 0.4);
  CHECK(std::abs(ddqn_target(t, online, target, 0.99) - 1.296) < 1e-12);
  CHECK(ddqn_target(Make({1}, 2, 0.93, true), online, target, 0.99) == 0.93);
  CHECK(ddqn_target(Make({}, 1, 0.5, false), online, target, 0.0) == 0.5);

  // Masked: next_state = {2}, the best target score is excluded.
  CHECK(ddqn_target(Make({}, 2, 0.2, false), online, target, 0.5) == 0.2 + 0.5 * 7.0);
  // Ties in the argmax network resolve to the lower index.
  CHECK(ddqn_target(Make({}, 1, 0.0, false), online, Table({0.0, 0.6, 0.6}), 1.0) == 0.4);
  // The standard convention swaps the roles.
  CHECK(ddqn_target(t, online, target, 0.99, DdqnConvention::Standard) == 0.9 + 0.99 * 0.3);
}

TEST_CASE("ddqn target with shared networks is the max backup") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(6);
    for (auto& v : q) v = rng.uniform(-1.0, 1.0);
    const auto t = Make({2}, 5, 0.3, false);
    double best = -1e300;
    for (std::uint32_t a = 1; a <= 6; ++a) {
      if (!t.next_state.contains(a)) best = std::max(best, q[a - 1]);
    }
    CHECK(ddqn_target(t, Table(q), Table(q), 0.9) == 0.3 + 0.9 * best);
  }
}

TEST_CASE("train_step") {
  NetworkConfig cfg;
  cfg.n_features = 4;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 5;
  AgentConfig agent;
  agent.batch_size = 1;
  agent.gamma = 0.0;
  agent.features = 2;
  const auto theta1 = init(cfg, 1);
  const auto theta2 = init(cfg, 2);

  SUBCASE("moves the prediction toward the target") {
    ReplayMemory m(4);
    m.push(Make({}, 3, 0.8, false));
    auto online = theta1;
    OptimizerState opt{0, 1e-2, 0, 5.0};
    Rng rng(1);
    const double before = forward(online, {})[2];
    train_step(m, online, theta2, opt, agent, rng);
    const double after = forward(online, {})[2];
    CHECK(std::abs(after - 0.8) < std::abs(before - 0.8));
  }
  SUBCASE("leaves parameters alone when targets are met") {
    ReplayMemory m(4);
    m.push(Make({}, 3, forward(theta1, {})[2], false));
    auto online = theta1;
    OptimizerState opt{0, 1e-2, 0, 5.0};
    Rng rng(1);
    train_step(m, online, theta2, opt, agent, rng);
    CHECK(online == theta1);
  }
  SUBCASE("is deterministic") {
    ReplayMemory m(8);
    for (std::uint32_t a = 1; a <= 4; ++a) m.push(Make({}, a, 0.1 * a, false));
    agent.batch_size = 3;
    agent.gamma = 0.9;
    auto a = theta1;
    auto b = theta1;
    OptimizerState oa{0, 1e-2, 0, 5.0};
    OptimizerState ob = oa;
    Rng ra(5);
    Rng rb(5);
    train_step(m, a, theta2, oa, agent, ra);
    train_step(m, b, theta2, ob, agent, rb);
    CHECK(a == b);
    CHECK_FALSE(a == theta1);
  }
}
