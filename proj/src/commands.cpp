#include "rlfs/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "rlfs/baselines.hpp"
#include "rlfs/error.hpp"
#include "rlfs/featurize.hpp"
#include "rlfs/rng.hpp"

namespace rlfs {
namespace fs = std::filesystem;
namespace {

using Clock = std::chrono::steady_clock;

std::string Num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
std::string Joined(const std::vector<T>& values, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    if constexpr (std::is_floating_point_v<T>) {
      out += Num(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void WriteJson(const fs::path& path, const Json& j) { WriteText(path, j.dump(2) + "\n"); }

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Population standard deviation.
double Stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Memoized fit-on-train, score-on-test accuracy of a column subset.
class SubsetScorer {
 public:
  SubsetScorer(const SampleMatrix& train, const SampleMatrix& test, ClassifierKind kind, std::uint64_t seed)
      : train_(train), test_(test), kind_(std::move(kind)), seed_(seed) {}

  double operator()(const std::vector<std::size_t>& columns) {
    if (auto it = cache_.find(columns); it != cache_.end()) return it->second;
    const auto clf = fit(kind_, project(train_, columns), seed_);
    const double acc = accuracy(clf, project(test_, columns));
    cache_.emplace(columns, acc);
    return acc;
  }

 private:
  const SampleMatrix& train_;
  const SampleMatrix& test_;
  ClassifierKind kind_;
  std::uint64_t seed_;
  std::map<std::vector<std::size_t>, double> cache_;
};

std::vector<std::size_t> SortedColumns(std::span<const std::uint32_t> picks) {
  std::vector<std::size_t> cols;
  for (auto f : picks) cols.push_back(f - 1);
  std::sort(cols.begin(), cols.end());
  return cols;
}

}  // namespace

CvResult subset_cv(const SampleMatrix& data, std::span<const std::size_t> columns,
                   const ClassifierKind& kind, std::size_t folds, std::uint64_t seed) {
  if (columns.empty()) throw ArgumentError("feature subset is empty");
  const auto plan = stratified_split(data, KFold{folds}, derive_seed(seed, "cv_split"));
  return cv_accuracy(kind, project(data, columns), plan, derive_seed(seed, "cv_fit"));
}

Json training_report(const RunConfig& cfg, const SampleMatrix& data, const TrainingResult& result) {
  Json episodes = Json::array();
  for (const auto& e : result.episodes) {
    episodes.push_back({{"episode", e.episode},
                        {"epsilon", e.epsilon},
                        {"final_reward", e.final_reward},
                        {"step_rewards", e.step_rewards}});
  }
  const auto items = result.optimal.items();
  Json names = Json::array();
  for (auto c : result.optimal.columns()) names.push_back(header_name(data.dictionary()[c]));
  return Json{
      {"version", kVersion},
      {"config", to_json(cfg)},
      {"dataset", {{"rows", data.n_rows()}, {"features", data.n_features()}}},
      {"episodes", episodes},
      {"optimal",
       {{"features", std::vector<std::uint32_t>(items.begin(), items.end())},
        {"columns", result.optimal.columns()},
        {"names", names},
        {"selection_order", result.selection_order}}},
      {"final_reward", result.final_reward},
      {"warmup_transitions", result.warmup_transitions},
      {"updates", result.updates},
      {"oracle_fits", result.oracle_fits},
      {"oracle_cache_hits", result.oracle_cache_hits},
  };
}

TrainOutcome cmd_train(const RunConfig& cfg) {
  const auto data = load_dataset(cfg);
  TrainOutcome out{train_agent(data, cfg), {}};
  out.report = training_report(cfg, data, out.result);

  fs::create_directories(cfg.out);
  WriteJson(cfg.out / "report.json", out.report);
  const auto& t = out.result.timings;
  WriteJson(cfg.out / "timings.json", {{"warmup_seconds", t.warmup_seconds},
                                       {"training_seconds", t.training_seconds},
                                       {"evaluation_seconds", t.evaluation_seconds}});
  std::ostringstream csv;
  csv << "episode,epsilon,final_reward,step_rewards\n";
  for (const auto& e : out.result.episodes) {
    csv << e.episode << ',' << Num(e.epsilon) << ',' << Num(e.final_reward) << ','
        << Joined(e.step_rewards) << '\n';
  }
  WriteText(cfg.out / "episodes.csv", csv.str());
  save_checkpoint(out.result.checkpoint, cfg.out / "checkpoint.json");
  return out;
}

std::vector<EvaluationRow> cmd_evaluate(const RunConfig& cfg, std::span<const std::size_t> columns,
                                        std::span<const ClassifierKind> classifiers) {
  const auto data = load_dataset(cfg);
  std::vector<EvaluationRow> rows;
  for (const auto& kind : classifiers) {
    rows.push_back({classifier_name(kind),
                    subset_cv(data, columns, kind, cfg.cv_folds, derive_seed(cfg.seed, "evaluate"))});
  }
  std::ostringstream csv;
  csv << "classifier,mean_accuracy,per_fold\n";
  Json j = Json::array();
  for (const auto& r : rows) {
    csv << r.classifier << ',' << Num(r.cv.mean) << ',' << Joined(r.cv.per_fold) << '\n';
    j.push_back({{"classifier", r.classifier}, {"mean_accuracy", r.cv.mean}, {"per_fold", r.cv.per_fold}});
  }
  WriteText(cfg.out / "evaluate.csv", csv.str());
  WriteJson(cfg.out / "evaluate.json",
            {{"version", kVersion},
             {"subset", std::vector<std::size_t>(columns.begin(), columns.end())},
             {"folds", cfg.cv_folds},
             {"results", j}});
  return rows;
}

std::vector<ComparisonRow> cmd_compare(const RunConfig& cfg, std::span<const std::size_t> sizes,
                                       std::span<const std::string> methods, std::size_t random_draws) {
  const auto data = load_dataset(cfg);
  const std::uint64_t cv_seed = derive_seed(cfg.seed, "compare");
  const auto cv = [&](const std::vector<std::size_t>& cols) {
    return subset_cv(data, cols, cfg.classifier, cfg.cv_folds, cv_seed).mean;
  };
  std::optional<RankedFeatures> ig;
  std::optional<RankedFeatures> chi;
  std::vector<ComparisonRow> rows;
  for (const auto& method : methods) {
    for (std::size_t size : sizes) {
      if (size == 0 || size > data.n_features()) {
        throw ArgumentError("subset size " + std::to_string(size) + " outside 1.." +
                            std::to_string(data.n_features()));
      }
      ComparisonRow row{method, size, 0.0, 0.0, {}};
      if (method == "rl") {
        RunConfig c = cfg;
        c.agent.features = size;
        row.subset = train_agent(data, c).optimal.columns();
        row.mean = cv(row.subset);
      } else if (method == "information_gain") {
        if (!ig) ig = information_gain(data);
        row.subset = top_k(*ig, size);
        row.mean = cv(row.subset);
      } else if (method == "chi_square") {
        if (!chi) chi = chi_square(data);
        row.subset = top_k(*chi, size);
        row.mean = cv(row.subset);
      } else if (method == "random") {
        if (random_draws == 0) throw ArgumentError("random method needs at least one draw");
        std::vector<double> accs;
        const std::uint64_t base = derive_seed(cfg.seed, "random", size);
        for (std::size_t i = 0; i < random_draws; ++i) {
          accs.push_back(cv(random_subset(data.n_features(), size, derive_seed(base, "draw", i))));
        }
        row.mean = Mean(accs);
        row.stddev = Stddev(accs);
      } else {
        throw ArgumentError("unknown method '" + method + "'");
      }
      rows.push_back(std::move(row));
    }
  }
  std::ostringstream csv;
  csv << "method,size,mean_accuracy,stddev,subset\n";
  for (const auto& r : rows) {
    csv << r.method << ',' << r.size << ',' << Num(r.mean) << ',' << Num(r.stddev) << ','
        << Joined(r.subset) << '\n';
  }
  WriteText(cfg.out / "compare.csv", csv.str());
  return rows;
}

std::uint64_t stability_seed(std::uint64_t root, std::size_t run) {
  return derive_seed(root, "stability", run);
}

StabilitySummary cmd_stability(const RunConfig& cfg, std::size_t runs) {
  if (runs == 0) throw ArgumentError("stability needs at least one run");
  const auto data = load_dataset(cfg);
  const std::uint64_t cv_seed = derive_seed(cfg.seed, "stability_cv");
  StabilitySummary s;
  for (std::size_t r = 0; r < runs; ++r) {
    RunConfig c = cfg;
    c.seed = stability_seed(cfg.seed, r);
    const auto result = train_agent(data, c);
    StabilityRun run{c.seed, result.selection_order, {}, result.final_reward};
    for (std::size_t k = 1; k <= run.selection_order.size(); ++k) {
      const auto cols = SortedColumns(std::span(run.selection_order).first(k));
      run.prefix_accuracy.push_back(subset_cv(data, cols, cfg.classifier, cfg.cv_folds, cv_seed).mean);
    }
    s.runs.push_back(std::move(run));
  }
  const std::size_t f = cfg.agent.features;
  std::vector<double> finals;
  for (std::size_t k = 0; k < f; ++k) {
    std::vector<double> at;
    for (const auto& run : s.runs) at.push_back(run.prefix_accuracy[k]);
    s.mean.push_back(Mean(at));
    s.stddev.push_back(Stddev(at));
    if (k + 1 == f) finals = at;
  }
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  s.final_range = *hi - *lo;

  std::ostringstream csv;
  csv << "run,seed,size,accuracy,feature\n";
  for (std::size_t r = 0; r < s.runs.size(); ++r) {
    const auto& run = s.runs[r];
    for (std::size_t k = 0; k < run.prefix_accuracy.size(); ++k) {
      csv << r << ',' << run.seed << ',' << k + 1 << ',' << Num(run.prefix_accuracy[k]) << ','
          << run.selection_order[k] - 1 << '\n';
    }
  }
  WriteText(cfg.out / "stability.csv", csv.str());
  std::ostringstream summary;
  summary << "size,mean_accuracy,stddev\n";
  for (std::size_t k = 0; k < f; ++k) summary << k + 1 << ',' << Num(s.mean[k]) << ',' << Num(s.stddev[k]) << '\n';
  WriteText(cfg.out / "stability_summary.csv", summary.str());
  return s;
}

std::vector<CurvePoint> period_average(std::span<const CurvePoint> points, std::size_t period) {
  if (period == 0) throw ArgumentError("period must be at least 1");
  std::vector<CurvePoint> out;
  for (std::size_t begin = 0; begin < points.size(); begin += period) {
    const std::size_t end = std::min(points.size(), begin + period);
    CurvePoint p;
    p.episode = points[end - 1].episode;
    for (std::size_t i = begin; i < end; ++i) {
      p.epsilon += points[i].epsilon;
      p.train_reward += points[i].train_reward;
      p.test_accuracy += points[i].test_accuracy;
    }
    const auto n = static_cast<double>(end - begin);
    p.epsilon /= n;
    p.train_reward /= n;
    p.test_accuracy /= n;
    out.push_back(p);
  }
  return out;
}

Curves cmd_curves(const RunConfig& cfg, std::size_t period) {
  if (period == 0) throw ArgumentError("period must be at least 1");
  if (cfg.eval_episodes == 0) throw ArgumentError("eval_episodes must be at least 1");
  const auto data = load_dataset(cfg);
  const auto plan = stratified_split(data, Holdout{cfg.test_fraction}, derive_seed(cfg.seed, "curves_split"));
  const auto train_rows = plan.rows_in(0);
  const auto test_rows = plan.rows_in(1);
  const auto train = data.select_rows(train_rows);
  const auto test = data.select_rows(test_rows);
  SubsetScorer scorer(train, test, cfg.classifier, derive_seed(cfg.seed, "curves_fit"));
  Rng eval_rng(derive_seed(cfg.seed, "curves_eval"));

  Curves curves;
  const auto observer = [&](const EpisodeRecord& record, const NetworkParams& online) {
    std::vector<double> accs;
    for (std::size_t i = 0; i < cfg.eval_episodes; ++i) {
      accs.push_back(scorer(SortedColumns(rollout(online, cfg.agent.features, cfg.eval_epsilon, eval_rng))));
    }
    curves.episodes.push_back({record.episode, record.epsilon, record.final_reward, Mean(accs)});
  };
  train_agent(train, cfg, observer);
  curves.periods = period_average(curves.episodes, period);

  const auto write = [&](const fs::path& path, const std::vector<CurvePoint>& points) {
    std::ostringstream csv;
    csv << "episode,epsilon,train_reward,test_accuracy\n";
    for (const auto& p : points) {
      csv << p.episode << ',' << Num(p.epsilon) << ',' << Num(p.train_reward) << ',' << Num(p.test_accuracy)
          << '\n';
    }
    WriteText(path, csv.str());
  };
  write(cfg.out / "curves.csv", curves.episodes);
  write(cfg.out / "curves_period.csv", curves.periods);
  return curves;
}

std::vector<TimingRow> cmd_timing(const RunConfig& cfg, std::span<const std::size_t> sizes,
                                  std::span<const ClassifierKind> classifiers, std::size_t repeats,
                                  TimingSubset subsets) {
  if (repeats == 0) throw ArgumentError("repeats must be at least 1");
  const auto data = load_dataset(cfg);
  std::optional<RankedFeatures> ig;
  if (subsets == TimingSubset::InformationGain) ig = information_gain(data);
  const std::uint64_t fit_seed = derive_seed(cfg.seed, "timing_fit");
  const auto time_fit = [&](const ClassifierKind& kind, const SampleMatrix& m) {
    std::vector<double> t;
    for (std::size_t i = 0; i < repeats; ++i) {
      const auto start = Clock::now();
      const auto clf = fit(kind, m, fit_seed);
      t.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    }
    return Median(t);
  };
  std::vector<TimingRow> rows;
  for (const auto& kind : classifiers) {
    const double full = time_fit(kind, data);
    for (std::size_t size : sizes) {
      const auto cols = ig ? top_k(*ig, size)
                           : random_subset(data.n_features(), size, derive_seed(cfg.seed, "timing", size));
      const double sub = time_fit(kind, project(data, cols));
      rows.push_back({classifier_name(kind), size, sub, full, 100.0 * sub / full});
    }
  }
  std::ostringstream csv;
  csv << "classifier,size,subset_seconds,full_seconds,percent\n";
  for (const auto& r : rows) {
    csv << r.classifier << ',' << r.size << ',' << Num(r.subset_seconds) << ',' << Num(r.full_seconds) << ','
        << Num(r.percent) << '\n';
  }
  WriteText(cfg.out / "timing.csv", csv.str());
  return rows;
}

SampleMatrix cmd_featurize(const FeaturizeOptions& options) {
  const fs::path& dir = options.input;
  if (!fs::is_directory(dir)) throw IoError("input directory " + dir.string() + " does not exist");

  const fs::path labels_path = dir / "labels.csv";
  std::ifstream in(labels_path);
  if (!in) throw IoError("cannot read " + labels_path.string());
  std::vector<std::pair<std::string, std::uint8_t>> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == "sample,label")) continue;
    const auto comma = line.rfind(',');
    const std::string label = comma == std::string::npos ? "" : line.substr(comma + 1);
    if (label != "0" && label != "1") {
      throw ParseError(labels_path.string() + ": line " + std::to_string(line_no) + ": expected <sample>,<0|1>");
    }
    samples.emplace_back(line.substr(0, comma), label == "1" ? 1 : 0);
  }
  if (samples.empty()) throw IoError(labels_path.string() + " lists no samples");

  FeatureDictionary dict;
  for (const auto& name : read_names_file(dir / "permissions.txt")) dict.add(name, FeatureCategory::Permission);
  for (const auto& name : read_names_file(dir / "intents.txt")) dict.add(name, FeatureCategory::Intent);

  const auto map = OpcodeAlphabetMap::dalvik();
  std::vector<std::string> letters;
  std::vector<std::string> malware;
  for (const auto& [sample, label] : samples) {
    letters.push_back(map_dalvik_to_letters(read_mnemonic_file(dir / (sample + ".opcodes")), map));
    if (label == 1) malware.push_back(letters.back());
  }
  NGramVocabulary vocab;
  try {
    vocab = build_vocabulary(malware, options.n, options.k);
  } catch (const VocabularyError& e) {
    throw VocabularyError(dir.string() + ": " + e.what());
  }
  for (const auto& gram : vocab.grams) dict.add(gram, FeatureCategory::NGram);

  std::vector<std::uint8_t> cells;
  std::vector<std::uint8_t> labels;
  cells.reserve(samples.size() * dict.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto names = read_names_file(dir / (samples[i].first + ".names"));
    const auto p = vectorize_declared(names, dict, FeatureCategory::Permission);
    const auto t = vectorize_declared(names, dict, FeatureCategory::Intent);
    const auto g = vectorize_ngrams(letters[i], vocab);
    cells.insert(cells.end(), p.bits.begin(), p.bits.end());
    cells.insert(cells.end(), t.bits.begin(), t.bits.end());
    cells.insert(cells.end(), g.begin(), g.end());
    labels.push_back(samples[i].second);
  }
  SampleMatrix matrix(std::move(dict), std::move(cells), std::move(labels));
  write_csv(matrix, options.output);
  return matrix;
}

}  // namespace rlfs
