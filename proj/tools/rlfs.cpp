// Command-line front end. Exit codes: 0 success, 1 usage or config error,
// 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rlfs/commands.hpp"
#include "rlfs/error.hpp"

namespace {

using namespace rlfs;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  bool paper_scale = false;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "root seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--csv", c.csv, "dataset CSV (overrides the config dataset)");
  cmd->add_flag("--paper-scale", c.paper_scale, "published hyperparameters instead of desk scale");
}

// Precedence: flag > file > default.
RunConfig Resolve(const Common& c) {
  Json j = Json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(c.config + ": " + e.what());
    }
  }
  if (c.paper_scale) j["paper_scale"] = true;
  if (c.csv) j["dataset"] = {{"csv", *c.csv}};
  RunConfig cfg = run_config_from_json(j);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  return cfg;
}

std::vector<ClassifierKind> Classifiers(const std::vector<std::string>& names) {
  std::vector<ClassifierKind> out;
  for (const auto& n : names) {
    try {
      out.push_back(classifier_from_name(n));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<std::size_t> ReportSubset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report " + path);
  try {
    return Json::parse(in).at("optimal").at("columns").get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement-learning feature selection over binary malware features"};
  app.require_subcommand(1);

  Common common;
  auto* train = app.add_subcommand("train", "train the agent and write report, episodes and checkpoint");
  AddCommon(train, common);

  auto* evaluate = app.add_subcommand("evaluate", "k-fold accuracy of a feature subset per classifier");
  AddCommon(evaluate, common);
  std::vector<std::size_t> subset;
  std::string report;
  std::vector<std::string> eval_classifiers{"decision_tree", "random_forest", "knn", "linear_svm"};
  auto* subset_opt = evaluate->add_option("--subset", subset, "0-based feature columns")->delimiter(',');
  evaluate->add_option("--report", report, "take the subset from a train report")
      ->check(CLI::ExistingFile)
      ->excludes(subset_opt);
  evaluate->add_option("--classifiers", eval_classifiers)->delimiter(',')->capture_default_str();

  auto* compare = app.add_subcommand("compare", "subset accuracy by selection method and size");
  AddCommon(compare, common);
  std::vector<std::size_t> compare_sizes{5, 10, 20};
  std::vector<std::string> methods{"rl", "information_gain", "chi_square", "random"};
  std::size_t draws = 20;
  compare->add_option("--sizes", compare_sizes)->delimiter(',')->capture_default_str();
  compare->add_option("--methods", methods)
      ->delimiter(',')
      ->check(CLI::IsMember({"rl", "information_gain", "chi_square", "random"}))
      ->capture_default_str();
  compare->add_option("--random-draws", draws)->capture_default_str();

  auto* stability = app.add_subcommand("stability", "independent runs and prefix-size accuracy curves");
  AddCommon(stability, common);
  std::size_t runs = 5;
  stability->add_option("--runs", runs)->check(CLI::PositiveNumber)->capture_default_str();

  auto* curves = app.add_subcommand("curves", "per-episode train reward and held-out test accuracy");
  AddCommon(curves, common);
  std::size_t period = 50;
  curves->add_option("--period", period)->check(CLI::PositiveNumber)->capture_default_str();

  auto* timing = app.add_subcommand("timing", "fit time on subsets relative to all features");
  AddCommon(timing, common);
  std::vector<std::size_t> timing_sizes{24};
  std::vector<std::string> timing_classifiers{"decision_tree"};
  std::size_t repeats = 5;
  std::string subset_method = "random";
  timing->add_option("--sizes", timing_sizes)->delimiter(',')->capture_default_str();
  timing->add_option("--classifiers", timing_classifiers)->delimiter(',')->capture_default_str();
  timing->add_option("--repeats", repeats)->check(CLI::PositiveNumber)->capture_default_str();
  timing->add_option("--subsets", subset_method, "random or information_gain")
      ->check(CLI::IsMember({"random", "information_gain"}))
      ->capture_default_str();

  auto* featurize = app.add_subcommand("featurize", "build a feature CSV from disassembled samples");
  FeaturizeOptions fz;
  std::string fz_input;
  std::string fz_output;
  featurize->add_option("--input", fz_input, "sample directory")->required();
  featurize->add_option("--output", fz_output, "CSV to write")->required();
  featurize->add_option("--n", fz.n, "n-gram length")->check(CLI::PositiveNumber)->capture_default_str();
  featurize->add_option("--k", fz.k, "vocabulary size")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (featurize->parsed()) {
      fz.input = fz_input;
      fz.output = fz_output;
      const auto m = cmd_featurize(fz);
      std::cout << "wrote " << fz.output.string() << ": " << m.n_rows() << " samples x " << m.n_features()
                << " features\n";
      return 0;
    }
    const RunConfig cfg = Resolve(common);
    if (train->parsed()) {
      const auto out = cmd_train(cfg);
      std::cout << "final subset (0-based):";
      for (auto c : out.result.optimal.columns()) std::cout << ' ' << c;
      std::cout << "\nfinal reward: " << out.result.final_reward << "\nwrote " << cfg.out.string() << "\n";
    } else if (evaluate->parsed()) {
      if (!report.empty()) subset = ReportSubset(report);
      if (subset.empty()) throw ConfigError("evaluate needs --subset or --report");
      for (const auto& r : cmd_evaluate(cfg, subset, Classifiers(eval_classifiers))) {
        std::cout << r.classifier << ": " << r.cv.mean << "\n";
      }
    } else if (compare->parsed()) {
      for (const auto& r : cmd_compare(cfg, compare_sizes, methods, draws)) {
        std::cout << r.method << " size " << r.size << ": " << r.mean;
        if (r.method == "random") std::cout << " +- " << r.stddev;
        std::cout << "\n";
      }
    } else if (stability->parsed()) {
      const auto s = cmd_stability(cfg, runs);
      for (std::size_t k = 0; k < s.mean.size(); ++k) {
        std::cout << "size " << k + 1 << ": mean " << s.mean[k] << " std " << s.stddev[k] << "\n";
      }
      std::cout << "final accuracy range: " << s.final_range << "\n";
    } else if (curves->parsed()) {
      for (const auto& p : cmd_curves(cfg, period).periods) {
        std::cout << "episode " << p.episode << ": train " << p.train_reward << " test " << p.test_accuracy
                  << "\n";
      }
    } else if (timing->parsed()) {
      for (const auto& r : cmd_timing(cfg, timing_sizes, Classifiers(timing_classifiers), repeats,
                                             subset_method == "random" ? TimingSubset::Random
                                                                       : TimingSubset::InformationGain)) {
        std::cout << r.classifier << " size " << r.size << ": " << r.percent << "%\n";
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
