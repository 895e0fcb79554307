#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "rlfs/env.hpp"
#include "rlfs/error.hpp"
#include "rlfs/rng.hpp"

using namespace rlfs;

TEST_CASE("episode state keeps sorted unique members") {
  const auto s = EpisodeState::from_sorted({5, 9}).with(3);
  CHECK(std::vector<std::uint32_t>(s.items().begin(), s.items().end()) == std::vector<std::uint32_t>{3, 5, 9});
  CHECK(s.columns() == std::vector<std::size_t>{2, 4, 8});
  CHECK(EpisodeState::from_unordered({9, 3, 5}) == s);
  CHECK_THROWS_AS(s.with(5), ArgumentError);
  CHECK_THROWS_AS(EpisodeState::from_sorted({3, 2}), ArgumentError);
  CHECK_THROWS_AS(EpisodeState::from_sorted({0}), ArgumentError);
}

TEST_CASE("insertion order never changes the final state") {
  std::vector<std::uint32_t> actions{7, 2, 11, 4};
  std::sort(actions.begin(), actions.end());
  EpisodeState ref;
  for (auto a : actions) ref = ref.with(a);
  do {
    EpisodeState s;
    for (auto a : actions) s = s.with(a);
    CHECK(s == ref);
  } while (std::next_permutation(actions.begin(), actions.end()));
}

TEST_CASE("environment steps and terminates") {
  const auto data = generate_synthetic({400, 12, {0}, 1.0, 1});
  RewardOracle oracle(data, DecisionTreeParams{}, 3);
  Environment env(oracle, 3);
  CHECK(env.reset().empty());
  CHECK(env.reset() == env.reset());

  auto r = env.step(EpisodeState::from_sorted({5, 9}), 3);
  CHECK(r.state == EpisodeState::from_sorted({3, 5, 9}));
  CHECK(r.done);
  r = env.step({}, 4);
  CHECK_FALSE(r.done);
  CHECK_THROWS_AS(env.step(r.state, 4), ArgumentError);
  CHECK_THROWS_AS(env.step(EpisodeState::from_sorted({1, 2, 3}), 4), ArgumentError);
  CHECK_THROWS_AS(env.step({}, 13), ArgumentError);
  CHECK_THROWS_AS(env.step({}, 0), ArgumentError);
}

TEST_CASE("episodes emit F transitions with growing states") {
  const auto data = generate_synthetic({300, 10, {1}, 0.9, 2});
  RewardOracle oracle(data, DecisionTreeParams{}, 3);
  Environment env(oracle, 4);
  Rng rng(1);
  auto state = env.reset();
  std::size_t steps = 0;
  for (;;) {
    std::uint32_t a;
    do {
      a = static_cast<std::uint32_t>(1 + rng.uniform_index(10));
    } while (state.contains(a));
    CHECK(state.size() == steps);
    const auto r = env.step(state, a);
    ++steps;
    CHECK(r.state.size() == steps);
    state = r.state;
    if (r.done) break;
  }
  CHECK(steps == 4);
}

TEST_CASE("oracle scores, memoizes, and stays pure") {
  const auto data = generate_synthetic({2000, 30, {0}, 1.0, 4});
  RewardOracle cached(data, DecisionTreeParams{}, 5);
  RewardOracle uncached(data, DecisionTreeParams{}, 5, 0.2, false);
  CHECK(cached.score_partition().n_rows() == 400);
  CHECK(cached(EpisodeState::from_sorted({1})) == 1.0);
  CHECK(cached.fits() == 1);
  CHECK(cached(EpisodeState::from_sorted({1})) == 1.0);
  CHECK(cached.fits() == 1);
  CHECK(cached.cache_hits() == 1);

  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint32_t> items;
    for (std::uint32_t f = 1; f <= 30; ++f) {
      if (rng.bernoulli(0.15)) items.push_back(f);
    }
    if (items.empty()) items.push_back(2);
    const auto s = EpisodeState::from_sorted(items);
    const double v = cached(s);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == uncached(s));
    CHECK(v == cached(s));
  }
}

TEST_CASE("noise-only subsets score near chance") {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = generate_synthetic({2000, 20, {0}, 0.9, seed});
    RewardOracle oracle(data, DecisionTreeParams{}, seed);
    const double v = oracle(EpisodeState::from_sorted({4, 9, 13}));
    CHECK(std::abs(v - 0.5) <= 0.075);
    sum += v;
  }
  CHECK(std::abs(sum / 10.0 - 0.5) <= 0.05);
}
