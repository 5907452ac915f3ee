#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vybench/leaderboard.hpp"
#include "vybench/metrics.hpp"
#include "vybench/predictors.hpp"

namespace vybench {

// Public/private task partition. The bitmask has bit t set when task t is
// public; it doubles as the deterministic split identity in reports.
struct SplitSpec {
  std::vector<int> public_tasks;
  std::vector<int> private_tasks;

  std::uint64_t mask() const;
  static SplitSpec from_mask(std::uint64_t mask, int n_tasks);

  double compression_rate(int n_tasks) const {
    return static_cast<double>(public_tasks.size()) / n_tasks;
  }
};

// Model-row partition that keeps training pairs away from validation pairs.
struct RowSplit {
  std::vector<int> train_rows;  // sorted ascending
  std::vector<int> val_rows;    // sorted ascending
};

// Pair-comparison datasets: features are concat(public_i, public_j) for
// i < j within one row set; the label says whether model i's private average
// is below model j's.
struct PairDataset {
  Eigen::MatrixXd x_train, x_val;
  std::vector<int> y_train, y_val;
};

// Score-estimation datasets: features are public rows, targets private-row
// means.
struct RegDataset {
  Eigen::MatrixXd x_train, x_val;
  std::vector<double> y_train, y_val;
};

struct SplitResult {
  SplitSpec split;
  PredictorSpec predictor;
  std::optional<ClassificationReport> classification;
  std::optional<RegressionReport> regression;
  double compression_rate = 0.0;
};

struct MetricStat {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_samples = 0;
};

struct CompressionProfile {
  struct Rate {
    double compression_rate = 0.0;
    int public_size = 0;
    int splits_considered = 0;
    int degenerate_skips = 0;
    std::map<std::string, MetricStat> stats;
  };
  std::vector<Rate> rates;
};

// How model rows are split (and optionally re-split) for each evaluation.
struct RowPolicy {
  double ratio = 0.7;
  std::uint64_t seed = 0;
  int repeats = 1;
};

// All 2^n - 2 public/private partitions in ascending bitmask order.
// n_tasks above 20 must go through sample_splits instead.
std::vector<SplitSpec> enumerate_splits(int n_tasks);

// For each public size k: min(per_rate, C(n,k)) distinct subsets, exhaustive
// when the census is small enough, uniformly sampled otherwise.
std::vector<SplitSpec> sample_splits(int n_tasks, int per_rate, std::uint64_t seed);

// Seeded shuffle, split at round(ratio*n), both sides clamped to >= 2 rows.
RowSplit make_row_split(int n_models, double ratio, std::uint64_t seed);

PairDataset build_pair_dataset(const Leaderboard& lb, const SplitSpec& split,
                               const RowSplit& rows);

RegDataset build_reg_dataset(const Leaderboard& lb, const SplitSpec& split,
                             const RowSplit& rows);

// Trains on the train side, evaluates on the validation side. Degenerate
// splits (single-class pair labels, or constant validation targets for
// regression) come back as nullopt after a WARN diagnostic.
std::optional<SplitResult> evaluate_split(const Leaderboard& lb, const SplitSpec& split,
                                          const PredictorSpec& spec,
                                          const RowSplit& rows);

// True for mse/rmse/mae/max_error, false for the score-like metrics.
bool metric_lower_is_better(const std::string& metric);

// Reads one metric out of a SplitResult; empty when not applicable.
std::optional<double> metric_value(const SplitResult& result, const std::string& metric);

// Exhaustively evaluates every split with |public|/n <= max_compression
// (sampled when n_tasks > 20 or samples_per_rate > 0) against every spec and
// returns the best by target_metric. Ties prefer smaller public sets, then
// lower bitmasks, then earlier specs.
SplitResult best_split_under_compression(const Leaderboard& lb, double max_compression,
                                         std::span<const PredictorSpec> specs,
                                         const std::string& target_metric,
                                         const RowSplit& rows,
                                         int samples_per_rate = 0,
                                         std::uint64_t sample_seed = 0);

// Smallest public subset whose metric meets the threshold, scanning public
// sizes in ascending order; nullopt when none qualifies.
std::optional<SplitResult> min_public_subset(const Leaderboard& lb,
                                             const PredictorSpec& spec,
                                             const std::string& metric, double threshold,
                                             const RowSplit& rows,
                                             int samples_per_rate = 0,
                                             std::uint64_t sample_seed = 0);

// Per-rate ci95 aggregation over all (split x spec) evaluations; repeated
// row splits are averaged per evaluation before pooling.
CompressionProfile compression_profile(const Leaderboard& lb,
                                       std::span<const PredictorSpec> specs,
                                       const RowPolicy& rows, int samples_per_rate = 0,
                                       std::uint64_t sample_seed = 0);

std::string split_result_to_json(const SplitResult& result,
                                 const Leaderboard& lb);
std::string profile_to_json(const CompressionProfile& profile);

}  // namespace vybench
