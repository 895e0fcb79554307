#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rlfs/commands.hpp"
#include "rlfs/error.hpp"

using namespace rlfs;
namespace fs = std::filesystem;

namespace {

fs::path Scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rlfs_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig Tiny(const std::string& name) {
  RunConfig cfg = default_run_config();
  cfg.dataset.synthetic = SyntheticSpec{200, 12, {0, 3}, 0.9, 5};
  cfg.network.embed_dim = 4;
  cfg.network.hidden_dim = 6;
  cfg.agent.features = 3;
  cfg.agent.episodes = 4;
  cfg.agent.warmup_steps = 30;
  cfg.agent.capacity = 100;
  cfg.agent.batch_size = 4;
  cfg.agent.updates_per_learn = 2;
  cfg.agent.sync_frequency = 2;
  cfg.cv_folds = 5;
  cfg.eval_episodes = 2;
  cfg.out = Scratch(name);
  return cfg;
}

}  // namespace

TEST_CASE("a one-episode run reports one episode and F features") {
  auto cfg = Tiny("one");
  cfg.agent.episodes = 1;
  const auto out = cmd_train(cfg);
  CHECK(out.report["episodes"].size() == 1);
  CHECK(out.report["optimal"]["features"].size() == 3);
  CHECK(out.result.optimal.size() == 3);
  for (const char* f : {"report.json", "timings.json", "episodes.csv", "checkpoint.json"}) {
    CHECK(fs::exists(cfg.out / f));
  }
}

TEST_CASE("training is reproducible byte for byte") {
  auto a = Tiny("repro_a");
  auto b = Tiny("repro_b");
  b.out = a.out;
  cmd_train(a);
  const auto first = Slurp(a.out / "report.json");
  const auto first_ckpt = Slurp(a.out / "checkpoint.json");
  const auto first_eps = Slurp(a.out / "episodes.csv");
  cmd_train(b);
  CHECK(Slurp(a.out / "report.json") == first);
  CHECK(Slurp(a.out / "checkpoint.json") == first_ckpt);
  CHECK(Slurp(a.out / "episodes.csv") == first_eps);
}

TEST_CASE("report episodes are contiguous and the checkpoint reloads") {
  const auto cfg = Tiny("contig");
  const auto out = cmd_train(cfg);
  const auto& eps = out.report["episodes"];
  REQUIRE(eps.size() == cfg.agent.episodes);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(eps[i]["episode"] == i + 1);
  const auto ckpt = load_checkpoint(cfg.out / "checkpoint.json");
  CHECK(ckpt.online == out.result.checkpoint.online);
  CHECK(out.report["config"] == to_json(cfg));
}

TEST_CASE("evaluate") {
  auto cfg = Tiny("evaluate");
  cfg.dataset.synthetic = SyntheticSpec{300, 6, {2}, 1.0, 1};
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  const std::vector<ClassifierKind> kinds{DecisionTreeParams{}, KnnParams{1}};
  const auto rows = cmd_evaluate(cfg, all, kinds);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].cv.mean == 1.0);
  CHECK(rows[0].cv.per_fold.size() == cfg.cv_folds);
  std::ifstream csv(cfg.out / "evaluate.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 3);
  const std::vector<std::size_t> none;
  CHECK_THROWS_AS(cmd_evaluate(cfg, none, kinds), ArgumentError);
}

TEST_CASE("compare") {
  auto cfg = Tiny("compare");
  cfg.dataset.synthetic = SyntheticSpec{300, 8, {5}, 1.0, 2};
  const std::vector<std::size_t> sizes{1, 2};
  const std::vector<std::string> methods{"information_gain", "chi_square", "random"};
  const auto rows = cmd_compare(cfg, sizes, methods, 4);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].subset == std::vector<std::size_t>{5});
  CHECK(rows[0].mean == 1.0);
  CHECK(rows[1].mean == 1.0);
  CHECK(rows[2].subset == std::vector<std::size_t>{5});
  CHECK(rows[4].method == "random");
  CHECK(rows[4].stddev >= 0.0);
  const auto again = cmd_compare(cfg, sizes, methods, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].mean == rows[i].mean);
  const std::vector<std::string> bad{"genetic"};
  CHECK_THROWS_AS(cmd_compare(cfg, sizes, bad, 4), ArgumentError);

  const std::vector<std::string> rl{"rl"};
  const std::vector<std::size_t> two{2};
  const auto rl_rows = cmd_compare(cfg, two, rl, 0);
  REQUIRE(rl_rows.size() == 1);
  CHECK(rl_rows[0].subset.size() == 2);
}

TEST_CASE("stability") {
  const auto cfg = Tiny("stability");
  const auto one = cmd_stability(cfg, 1);
  CHECK(one.runs.size() == 1);
  CHECK(one.runs[0].prefix_accuracy.size() == cfg.agent.features);
  CHECK(one.final_range == 0.0);
  const auto two = cmd_stability(cfg, 2);
  REQUIRE(two.stddev.size() == cfg.agent.features);
  for (std::size_t k = 0; k < cfg.agent.features; ++k) {
    const double a = two.runs[0].prefix_accuracy[k];
    const double b = two.runs[1].prefix_accuracy[k];
    CHECK(two.mean[k] == doctest::Approx((a + b) / 2));
    CHECK(two.stddev[k] == doctest::Approx(std::abs(a - b) / 2));
  }
}

TEST_CASE("curves") {
  auto cfg = Tiny("curves");
  cfg.agent.episodes = 7;
  const auto c = cmd_curves(cfg, 3);
  REQUIRE(c.episodes.size() == 7);
  REQUIRE(c.periods.size() == 3);
  CHECK(c.periods[2].episode == 7);
  CHECK(c.periods[0].train_reward ==
        doctest::Approx((c.episodes[0].train_reward + c.episodes[1].train_reward + c.episodes[2].train_reward) / 3));
  const auto per_episode = period_average(c.episodes, 1);
  REQUIRE(per_episode.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(per_episode[i].train_reward == c.episodes[i].train_reward);
    CHECK(per_episode[i].test_accuracy == c.episodes[i].test_accuracy);
  }
}

TEST_CASE("timing table shape") {
  auto cfg = Tiny("timing");
  const std::vector<std::size_t> sizes{2, 12};
  const std::vector<ClassifierKind> kinds{DecisionTreeParams{}, KnnParams{}};
  const auto rows = cmd_timing(cfg, sizes, kinds, 3);
  CHECK(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.percent > 0.0);
  const std::vector<std::size_t> one{1};
  const auto ig_rows = cmd_timing(cfg, one, kinds, 1, TimingSubset::InformationGain);
  CHECK(ig_rows.size() == 2);
}

TEST_CASE("featurize builds permission, intent and n-gram blocks") {
  const auto dir = Scratch("featurize_in");
  std::ofstream(dir / "permissions.txt") << "android.permission.SEND_SMS\nandroid.permission.INTERNET\n";
  std::ofstream(dir / "intents.txt") << "android.intent.action.BOOT_COMPLETED\n";
  std::ofstream(dir / "labels.csv") << "sample,label\nbad,1\ngood,0\n";
  std::ofstream(dir / "bad.opcodes") << "move\nmove\nreturn\ninvoke-direct\n";
  std::ofstream(dir / "bad.names") << "android.permission.SEND_SMS\nandroid.intent.action.BOOT_COMPLETED\n";
  std::ofstream(dir / "good.opcodes") << "if-eq\ngoto\nmove\nmove\n";
  std::ofstream(dir / "good.names") << "android.permission.INTERNET\ncom.example.UNKNOWN\n";

  const auto out = Scratch("featurize_out") / "features.csv";
  const auto m = cmd_featurize({dir, out, 2, 2});
  REQUIRE(m.n_features() == 2 + 1 + 2);
  CHECK(m.dictionary()[3].name == "MM");
  CHECK(m.dictionary()[4].name == "MR");
  CHECK(std::vector<std::uint8_t>(m.row(0).begin(), m.row(0).end()) == std::vector<std::uint8_t>{1, 0, 1, 1, 1});
  CHECK(std::vector<std::uint8_t>(m.row(1).begin(), m.row(1).end()) == std::vector<std::uint8_t>{0, 1, 0, 1, 0});
  CHECK(m.label(0) == 1);
  CHECK(load_csv(out) == m);
  CHECK(cmd_featurize({dir, out, 2, 2}) == m);

  const auto empty = Scratch("featurize_empty");
  CHECK_THROWS(cmd_featurize({empty, out, 2, 2}));
  std::ofstream(empty / "labels.csv") << "sample,label\n";
  CHECK_THROWS(cmd_featurize({empty, out, 2, 2}));
  CHECK_THROWS_AS(cmd_featurize({dir, out, 2, 50}), VocabularyError);
}

TEST_CASE("config round-trips and rejects unknown keys") {
  auto cfg = Tiny("config");
  cfg.classifier = RandomForestParams{7, 2};
  cfg.network.cell = CellKind::GRU;
  const auto back = run_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK_THROWS_AS(run_config_from_json(Json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(Json{{"agent", {{"gama", 0.5}}}}), ConfigError);

  RunConfig paper = run_config_from_json(Json{{"paper_scale", true}});
  CHECK(paper.agent.warmup_steps == 50000);
  CHECK(paper.agent.capacity == 200000);
  CHECK(paper.agent.gamma == 0.99);
  CHECK(paper.agent.learning_rate == 3e-4);
  RunConfig mixed = run_config_from_json(Json{{"paper_scale", true}, {"agent", {{"gamma", 0.5}}}});
  CHECK(mixed.agent.gamma == 0.5);
}
