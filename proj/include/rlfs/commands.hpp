#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlfs/classifiers.hpp"
#include "rlfs/config.hpp"
#include "rlfs/training.hpp"

namespace rlfs {

inline constexpr std::string_view kVersion = "rlfs/1.0";

// Mean k-fold accuracy of kind on the columns of data. The split and the
// classifier seeds derive from seed, so equal inputs give equal numbers.
CvResult subset_cv(const SampleMatrix& data, std::span<const std::size_t> columns,
                   const ClassifierKind& kind, std::size_t folds, std::uint64_t seed);

// Deterministic part of a training run; timings live in a separate file.
Json training_report(const RunConfig& cfg, const SampleMatrix& data, const TrainingResult& result);

struct TrainOutcome {
  TrainingResult result;
  Json report;
};

// Writes report.json, timings.json, episodes.csv and checkpoint.json to
// cfg.out.
TrainOutcome cmd_train(const RunConfig& cfg);

struct EvaluationRow {
  std::string classifier;
  CvResult cv;
};

// 0-based columns; writes evaluate.csv and evaluate.json.
std::vector<EvaluationRow> cmd_evaluate(const RunConfig& cfg, std::span<const std::size_t> columns,
                                        std::span<const ClassifierKind> classifiers);

struct ComparisonRow {
  std::string method;
  std::size_t size = 0;
  double mean = 0.0;
  double stddev = 0.0;  // over random draws; 0 for deterministic methods
  std::vector<std::size_t> subset;  // empty for the random method
};

// Methods: rl, information_gain, chi_square, random. Writes compare.csv.
std::vector<ComparisonRow> cmd_compare(const RunConfig& cfg, std::span<const std::size_t> sizes,
                                       std::span<const std::string> methods, std::size_t random_draws);

struct StabilityRun {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> selection_order;
  std::vector<double> prefix_accuracy;  // CV accuracy of the first 1..F picks
  double final_reward = 0.0;
};

struct StabilitySummary {
  std::vector<StabilityRun> runs;
  std::vector<double> mean;    // per prefix size
  std::vector<double> stddev;  // per prefix size
  double final_range = 0.0;    // max - min of full-subset accuracy
};

std::uint64_t stability_seed(std::uint64_t root, std::size_t run);

// Writes stability.csv and stability_summary.csv.
StabilitySummary cmd_stability(const RunConfig& cfg, std::size_t runs);

struct CurvePoint {
  std::size_t episode = 0;
  double epsilon = 0.0;
  double train_reward = 0.0;
  double test_accuracy = 0.0;  // mean over evaluation rollouts
};

struct Curves {
  std::vector<CurvePoint> episodes;
  std::vector<CurvePoint> periods;  // episode holds the last episode of the period
};

std::vector<CurvePoint> period_average(std::span<const CurvePoint> points, std::size_t period);

// Trains on a stratified train partition and tests each episode's policy on
// the held-out partition. Writes curves.csv and curves_period.csv.
Curves cmd_curves(const RunConfig& cfg, std::size_t period);

struct TimingRow {
  std::string classifier;
  std::size_t size = 0;
  double subset_seconds = 0.0;
  double full_seconds = 0.0;
  double percent = 0.0;
};

enum class TimingSubset { Random, InformationGain };

// Median fit time over repeats on a subset of each size relative to the full
// feature set. Subsets are random draws or the information-gain top-k (a
// stand-in for a selected subset). Writes timing.csv.
std::vector<TimingRow> cmd_timing(const RunConfig& cfg, std::span<const std::size_t> sizes,
                                  std::span<const ClassifierKind> classifiers, std::size_t repeats,
                                  TimingSubset subsets = TimingSubset::Random);

struct FeaturizeOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  int n = 4;
  std::size_t k = 500;
};

// Input layout: permissions.txt, intents.txt, labels.csv (sample,label) and
// per sample <sample>.opcodes and <sample>.names. The n-gram vocabulary is
// built from malware samples only.
SampleMatrix cmd_featurize(const FeaturizeOptions& options);

}  // namespace rlfs
