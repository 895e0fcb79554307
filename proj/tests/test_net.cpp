#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "rlfs/error.hpp"
#include "rlfs/net.hpp"
#include "rlfs/rng.hpp"

#include "oracles.hpp"

using namespace rlfs;

namespace {

NetworkConfig Small(CellKind cell, HeadKind head = HeadKind::Linear) {
  NetworkConfig c;
  c.n_features = 5;
  c.embed_dim = 3;
  c.hidden_dim = 4;
  c.cell = cell;
  c.head = head;
  return c;
}

constexpr CellKind kCells[] = {CellKind::RNN, CellKind::GRU, CellKind::LSTM};

}  // namespace

TEST_CASE("forward handles the empty state and softmax normalizes") {
  for (CellKind cell : kCells) {
    const auto params = init(Small(cell, HeadKind::Softmax), 1);
    const auto q = forward(params, {});
    REQUIRE(q.size() == 5);
    CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double v : q) CHECK(v > 0.0);
  }
}

TEST_CASE("forward depends on the set, not the insertion order") {
  const auto params = init(Small(CellKind::LSTM), 2);
  const auto a = forward(params, EpisodeState::from_sorted({1, 2, 3}));
  const auto b = forward(params, EpisodeState{}.with(1).with(3).with(2));
  CHECK(a == b);
  CHECK(a == forward(params, EpisodeState::from_sorted({1, 2, 3})));
}

TEST_CASE("backward matches central differences") {
  for (CellKind cell : kCells) {
    for (HeadKind head : {HeadKind::Linear, HeadKind::Softmax}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(cell_name(cell));
        CAPTURE(head_name(head));
        CAPTURE(seed);
        CHECK(oracle::max_gradient_error(Small(cell, head), seed) < 1e-4);
      }
    }
  }
}

TEST_CASE("backward edge cases") {
  const auto params = init(Small(CellKind::GRU), 3);
  const auto state = EpisodeState::from_sorted({2, 4});
  const double q = forward(params, state)[0];
  auto g = backward(params, state, 1, q);
  for (double v : g.values()) CHECK(v == 0.0);

  g = backward(params, state, 1, q + 1.0);
  const auto emb = g.tensor(Tensor::Embedding);
  const std::size_t e = params.config().embed_dim;
  for (std::size_t token : {1, 3, 5}) {
    for (std::size_t j = 0; j < e; ++j) CHECK(emb[token * e + j] == 0.0);
  }
  CHECK_THROWS_AS(backward(params, state, 1, std::nan("")), ArgumentError);
  CHECK_THROWS_AS(backward(params, state, 6, 0.0), ArgumentError);
}

TEST_CASE("init is bounded, seeded, and sets the forget bias") {
  for (CellKind cell : kCells) {
    const auto cfg = Small(cell);
    const auto p = init(cfg, 11);
    CHECK(p == init(cfg, 11));
    CHECK_FALSE(p == init(cfg, 12));
    CHECK(p.all_finite());
    const auto check_bound = [&](Tensor t, double fan_in) {
      for (double v : p.tensor(t)) CHECK(std::abs(v) <= 1.0 / std::sqrt(fan_in));
    };
    check_bound(Tensor::Embedding, 1.0);
    check_bound(Tensor::InputWeights, static_cast<double>(cfg.embed_dim));
    check_bound(Tensor::RecurrentWeights, static_cast<double>(cfg.hidden_dim));
    check_bound(Tensor::OutputWeights, static_cast<double>(cfg.hidden_dim));
    for (double v : p.tensor(Tensor::OutputBias)) CHECK(v == 0.0);
    const auto bias = p.tensor(Tensor::Bias);
    const std::size_t h = cfg.hidden_dim;
    for (std::size_t i = 0; i < bias.size(); ++i) {
      const bool forget = cell == CellKind::LSTM && i >= h && i < 2 * h;
      CHECK(bias[i] == (forget ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("optimizer step, clipping, and decay") {
  const auto cfg = Small(CellKind::RNN);
  auto params = init(cfg, 1);
  const auto before = params;
  NetworkParams grads(cfg);
  OptimizerState opt;
  step(params, grads, opt);
  CHECK(params == before);
  CHECK(opt.step == 1);

  // Norm-10 gradient concentrated in one entry, clipped to 1.
  grads.values()[0] = 10.0;
  opt = OptimizerState{0, 0.5, 0, 1.0};
  CHECK(global_norm(grads) == 10.0);
  step(params, grads, opt);
  CHECK(params.values()[0] == before.values()[0] - 0.5 * 1.0);

  params = before;
  opt = OptimizerState{4, 0.5, 4, 1.0};
  CHECK(opt.rate() == 0.0);
  step(params, grads, opt);
  CHECK(params == before);
  CHECK(OptimizerState{1, 0.4, 4, 1.0}.rate() == doctest::Approx(0.3));
}

TEST_CASE("sync copies and rejects mismatched shapes") {
  const auto a = init(Small(CellKind::LSTM), 1);
  auto b = init(Small(CellKind::LSTM), 2);
  sync(a, b);
  CHECK(a == b);
  sync(a, b);
  CHECK(a == b);
  const auto state = EpisodeState::from_sorted({3});
  CHECK(forward(a, state) == forward(b, state));
  auto other = Small(CellKind::LSTM);
  other.hidden_dim = 5;
  auto c = init(other, 1);
  CHECK_THROWS_AS(sync(a, c), ArgumentError);
}

TEST_CASE("repeated steps fit a fixed batch") {
  for (CellKind cell : kCells) {
    CAPTURE(cell_name(cell));
    auto cfg = Small(cell);
    auto params = init(cfg, 5);
    Rng rng(6);
    struct Item {
      EpisodeState state;
      std::uint32_t action;
      double target;
    };
    std::vector<Item> batch;
    for (int i = 0; i < 4; ++i) {
      std::vector<std::uint32_t> s;
      for (std::uint32_t f = 1; f <= 5; ++f) {
        if (rng.bernoulli(0.4)) s.push_back(f);
      }
      batch.push_back({EpisodeState::from_sorted(s), static_cast<std::uint32_t>(i + 1), rng.uniform(0.0, 1.0)});
    }
    OptimizerState opt{0, 0.1, 0, 5.0};
    for (int it = 0; it < 200; ++it) {
      NetworkParams grads(cfg);
      for (const auto& item : batch) accumulate_backward(params, item.state, item.action, item.target, grads);
      step(params, grads, opt);
    }
    for (const auto& item : batch) {
      CHECK(std::abs(forward(params, item.state)[item.action - 1] - item.target) < 1e-2);
    }
  }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Checkpoint c{init(Small(CellKind::GRU), 1), init(Small(CellKind::GRU), 2), OptimizerState{17, 3e-4, 100, 5.0}};
  c.online.values()[0] = 0.1 + 0.2;
  c.online.values()[1] = -1.0 / 3.0;
  const auto path = std::filesystem::temp_directory_path() / "rlfs_test_checkpoint.json";
  save_checkpoint(c, path);
  const auto back = load_checkpoint(path);
  CHECK(back.online == c.online);
  CHECK(back.target == c.target);
  CHECK(back.optimizer == c.optimizer);
}
