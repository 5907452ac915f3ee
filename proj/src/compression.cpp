#include "vybench/compression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vybench/common.hpp"
#include "vybench/rng.hpp"

namespace vybench {

namespace {

constexpr int kEnumerationCap = 20;

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // Saturate instead of overflowing; callers only compare against budgets.
    if (result > UINT64_MAX / num) return UINT64_MAX;
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

void check_split(const SplitSpec& split, int n_tasks) {
  if (split.public_tasks.empty() || split.private_tasks.empty()) {
    throw DataError("split must have non-empty public and private sides");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_tasks), false);
  for (const auto& side : {split.public_tasks, split.private_tasks}) {
    for (const int t : side) {
      if (t < 0 || t >= n_tasks || seen[static_cast<std::size_t>(t)]) {
        throw DataError("split is not a partition of the task set");
      }
      seen[static_cast<std::size_t>(t)] = true;
    }
  }
  if (static_cast<int>(split.public_tasks.size() + split.private_tasks.size()) !=
      n_tasks) {
    throw DataError("split does not cover the task set");
  }
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = m.col(cols[c]);
  }
  return out;
}

}  // namespace

std::uint64_t SplitSpec::mask() const {
  std::uint64_t m = 0;
  for (const int t : public_tasks) m |= (1ULL << t);
  return m;
}

SplitSpec SplitSpec::from_mask(std::uint64_t mask, int n_tasks) {
  SplitSpec split;
  for (int t = 0; t < n_tasks; ++t) {
    if (mask & (1ULL << t)) {
      split.public_tasks.push_back(t);
    } else {
      split.private_tasks.push_back(t);
    }
  }
  return split;
}

std::vector<SplitSpec> enumerate_splits(int n_tasks) {
  if (n_tasks < 2) throw DataError("enumerate_splits: need at least 2 tasks");
  if (n_tasks > kEnumerationCap) {
    throw DataError("enumerate_splits: n_tasks > " + std::to_string(kEnumerationCap) +
                    ", use sample_splits");
  }
  std::vector<SplitSpec> splits;
  const std::uint64_t top = (1ULL << n_tasks) - 1;
  splits.reserve(static_cast<std::size_t>(top - 1));
  for (std::uint64_t mask = 1; mask < top; ++mask) {
    splits.push_back(SplitSpec::from_mask(mask, n_tasks));
  }
  return splits;
}

std::vector<SplitSpec> sample_splits(int n_tasks, int per_rate, std::uint64_t seed) {
  if (n_tasks < 2) throw DataError("sample_splits: need at least 2 tasks");
  if (per_rate < 1) throw DataError("sample_splits: per_rate must be positive");

  std::vector<SplitSpec> splits;
  Rng rng(mix_seed(seed, 0x73706c69));
  std::vector<int> all(static_cast<std::size_t>(n_tasks));
  std::iota(all.begin(), all.end(), 0);

  for (int k = 1; k <= n_tasks - 1; ++k) {
    const std::uint64_t census = binomial(n_tasks, k);
    if (census <= static_cast<std::uint64_t>(per_rate) && n_tasks <= 63) {
      // Exhaustive: all k-subsets in ascending bitmask order.
      std::vector<std::uint64_t> masks;
      for (std::uint64_t mask = 1; mask < (1ULL << n_tasks); ++mask) {
        if (static_cast<int>(std::popcount(mask)) == k) masks.push_back(mask);
      }
      for (const std::uint64_t mask : masks) {
        splits.push_back(SplitSpec::from_mask(mask, n_tasks));
      }
    } else {
      std::set<std::uint64_t> taken;
      while (static_cast<int>(taken.size()) < per_rate) {
        std::vector<int> pool = all;
        rng.shuffle(pool);
        std::uint64_t mask = 0;
        for (int i = 0; i < k; ++i) mask |= (1ULL << pool[static_cast<std::size_t>(i)]);
        taken.insert(mask);
      }
      for (const std::uint64_t mask : taken) {
        splits.push_back(SplitSpec::from_mask(mask, n_tasks));
      }
    }
  }
  return splits;
}

RowSplit make_row_split(int n_models, double ratio, std::uint64_t seed) {
  if (n_models < 4) throw DataError("make_row_split: need at least 4 models");
  if (ratio <= 0.0 || ratio >= 1.0) throw DataError("make_row_split: ratio in (0,1)");

  std::vector<int> order(static_cast<std::size_t>(n_models));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x726f7773));
  rng.shuffle(order);

  int cut = static_cast<int>(std::llround(ratio * n_models));
  cut = std::clamp(cut, 2, n_models - 2);

  RowSplit rows;
  rows.train_rows.assign(order.begin(), order.begin() + cut);
  rows.val_rows.assign(order.begin() + cut, order.end());
  std::sort(rows.train_rows.begin(), rows.train_rows.end());
  std::sort(rows.val_rows.begin(), rows.val_rows.end());
  return rows;
}

namespace {

void check_rows(const RowSplit& rows, int n_models) {
  if (rows.train_rows.size() < 2 || rows.val_rows.size() < 2) {
    throw DataError("row split sides must have >= 2 rows");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_models), false);
  for (const auto& side : {rows.train_rows, rows.val_rows}) {
    for (const int r : side) {
      if (r < 0 || r >= n_models || seen[static_cast<std::size_t>(r)]) {
        throw DataError("row split is not a partition of the model rows");
      }
      seen[static_cast<std::size_t>(r)] = true;
    }
  }
}

double private_mean(const Eigen::MatrixXd& scores, const std::vector<int>& private_tasks,
                    int row) {
  double sum = 0.0;
  for (const int t : private_tasks) sum += scores(row, t);
  return sum / static_cast<double>(private_tasks.size());
}

}  // namespace

PairDataset build_pair_dataset(const Leaderboard& lb, const SplitSpec& split,
                               const RowSplit& rows) {
  if (!lb.normalized) throw DataError("build_pair_dataset: leaderboard not normalized");
  check_split(split, lb.n_tasks());
  check_rows(rows, lb.n_models());

  const Eigen::MatrixXd public_scores = select_columns(lb.scores, split.public_tasks);
  const Eigen::Index p = public_scores.cols();

  const auto build = [&](const std::vector<int>& row_set, Eigen::MatrixXd& x,
                         std::vector<int>& y) {
    const std::size_t n = row_set.size();
    x.resize(static_cast<Eigen::Index>(n * (n - 1) / 2), 2 * p);
    y.clear();
    Eigen::Index at = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const int i = row_set[a];
        const int j = row_set[b];
        x.row(at).head(p) = public_scores.row(i);
        x.row(at).tail(p) = public_scores.row(j);
        const double avg_i = private_mean(lb.scores, split.private_tasks, i);
        const double avg_j = private_mean(lb.scores, split.private_tasks, j);
        y.push_back(avg_i < avg_j ? 1 : 0);  // ties get 0, the strict indicator
        ++at;
      }
    }
  };

  PairDataset ds;
  build(rows.train_rows, ds.x_train, ds.y_train);
  build(rows.val_rows, ds.x_val, ds.y_val);
  return ds;
}

RegDataset build_reg_dataset(const Leaderboard& lb, const SplitSpec& split,
                             const RowSplit& rows) {
  if (!lb.normalized) throw DataError("build_reg_dataset: leaderboard not normalized");
  check_split(split, lb.n_tasks());
  check_rows(rows, lb.n_models());

  const Eigen::MatrixXd public_scores = select_columns(lb.scores, split.public_tasks);

  const auto build = [&](const std::vector<int>& row_set, Eigen::MatrixXd& x,
                         std::vector<double>& y) {
    x.resize(static_cast<Eigen::Index>(row_set.size()), public_scores.cols());
    y.clear();
    for (std::size_t a = 0; a < row_set.size(); ++a) {
      x.row(static_cast<Eigen::Index>(a)) = public_scores.row(row_set[a]);
      y.push_back(private_mean(lb.scores, split.private_tasks, row_set[a]));
    }
  };

  RegDataset ds;
  build(rows.train_rows, ds.x_train, ds.y_train);
  build(rows.val_rows, ds.x_val, ds.y_val);
  return ds;
}

namespace {

bool single_class(const std::vector<int>& y) {
  return std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); });
}

bool constant_values(const std::vector<double>& y) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

std::string split_tag(const SplitSpec& split) {
  return "split mask=" + std::to_string(split.mask());
}

}  // namespace

std::optional<SplitResult> evaluate_split(const Leaderboard& lb, const SplitSpec& split,
                                          const PredictorSpec& spec,
                                          const RowSplit& rows) {
  SplitResult result;
  result.split = split;
  result.predictor = spec;
  result.compression_rate = split.compression_rate(lb.n_tasks());

  if (spec.problem == Problem::classification) {
    const PairDataset ds = build_pair_dataset(lb, split, rows);
    if (single_class(ds.y_train) || single_class(ds.y_val)) {
      diag::warn(split_tag(split) + " skipped: single-class comparison labels");
      return std::nullopt;
    }
    const TrainedPredictor model = train_classifier(spec, ds.x_train, ds.y_train);
    const auto [labels, scores] = predict(model, ds.x_val);
    result.classification = classification_metrics(ds.y_val, labels, scores);
  } else {
    const RegDataset ds = build_reg_dataset(lb, split, rows);
    if (constant_values(ds.y_val)) {
      diag::warn(split_tag(split) + " skipped: constant validation targets");
      return std::nullopt;
    }
    const TrainedPredictor model = train_regressor(spec, ds.x_train, ds.y_train);
    const std::vector<double> pred = predict_values(model, ds.x_val);
    result.regression = regression_metrics(ds.y_val, pred);
  }
  return result;
}

bool metric_lower_is_better(const std::string& metric) {
  return metric == "mse" || metric == "rmse" || metric == "mae" ||
         metric == "max_error";
}

std::optional<double> metric_value(const SplitResult& result, const std::string& metric) {
  if (result.classification) {
    const auto& c = *result.classification;
    if (metric == "accuracy") return c.accuracy;
    if (metric == "f1") return c.f1;
    if (metric == "precision") return c.precision;
    if (metric == "recall") return c.recall;
    if (metric == "roc_auc") return c.roc_auc;
  }
  if (result.regression) {
    const auto& r = *result.regression;
    if (metric == "mse") return r.mse;
    if (metric == "rmse") return r.rmse;
    if (metric == "mae") return r.mae;
    if (metric == "max_error") return r.max_error;
    if (metric == "r2") return r.r2;
  }
  return std::nullopt;
}

namespace {

// Splits grouped by public size, either the full census or a sampled one.
std::vector<SplitSpec> candidate_splits(int n_tasks, int samples_per_rate,
                                        std::uint64_t seed) {
  if (samples_per_rate > 0) {
    return sample_splits(n_tasks, samples_per_rate, seed);
  }
  return enumerate_splits(n_tasks);
}

struct Candidate {
  SplitResult result;
  double value = 0.0;
  std::size_t spec_index = 0;
};

bool better_than(const Candidate& a, const Candidate& b, bool lower_better) {
  if (a.value != b.value) return lower_better ? a.value < b.value : a.value > b.value;
  const auto a_size = a.result.split.public_tasks.size();
  const auto b_size = b.result.split.public_tasks.size();
  if (a_size != b_size) return a_size < b_size;
  if (a.result.split.mask() != b.result.split.mask()) {
    return a.result.split.mask() < b.result.split.mask();
  }
  return a.spec_index < b.spec_index;
}

}  // namespace

SplitResult best_split_under_compression(const Leaderboard& lb, double max_compression,
                                         std::span<const PredictorSpec> specs,
                                         const std::string& target_metric,
                                         const RowSplit& rows, int samples_per_rate,
                                         std::uint64_t sample_seed) {
  const int n = lb.n_tasks();
  const int max_public =
      std::min(n - 1, static_cast<int>(std::floor(max_compression * n + 1e-9)));
  if (max_public < 1) {
    throw DataError("max_compression below 1/n_tasks leaves no valid split");
  }
  if (specs.empty()) throw DataError("no predictor specs given");

  const bool lower_better = metric_lower_is_better(target_metric);
  std::optional<Candidate> best;
  for (const SplitSpec& split : candidate_splits(n, samples_per_rate, sample_seed)) {
    if (static_cast<int>(split.public_tasks.size()) > max_public) continue;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const auto result = evaluate_split(lb, split, specs[s], rows);
      if (!result) continue;
      const auto value = metric_value(*result, target_metric);
      if (!value) continue;
      Candidate candidate{*result, *value, s};
      if (!best || better_than(candidate, *best, lower_better)) {
        best = std::move(candidate);
      }
    }
  }
  if (!best) {
    throw DataError("no evaluable split under the compression bound (metric '" +
                    target_metric + "')");
  }
  return best->result;
}

std::optional<SplitResult> min_public_subset(const Leaderboard& lb,
                                             const PredictorSpec& spec,
                                             const std::string& metric, double threshold,
                                             const RowSplit& rows, int samples_per_rate,
                                             std::uint64_t sample_seed) {
  const int n = lb.n_tasks();
  const bool lower_better = metric_lower_is_better(metric);

  std::vector<SplitSpec> splits = candidate_splits(n, samples_per_rate, sample_seed);
  std::stable_sort(splits.begin(), splits.end(),
                   [](const SplitSpec& a, const SplitSpec& b) {
                     if (a.public_tasks.size() != b.public_tasks.size()) {
                       return a.public_tasks.size() < b.public_tasks.size();
                     }
                     return a.mask() < b.mask();
                   });

  for (const SplitSpec& split : splits) {
    const auto result = evaluate_split(lb, split, spec, rows);
    if (!result) continue;
    const auto value = metric_value(*result, metric);
    if (!value) continue;
    if (lower_better ? (*value <= threshold) : (*value >= threshold)) {
      return result;
    }
  }
  return std::nullopt;
}

CompressionProfile compression_profile(const Leaderboard& lb,
                                       std::span<const PredictorSpec> specs,
                                       const RowPolicy& rows, int samples_per_rate,
                                       std::uint64_t sample_seed) {
  if (specs.empty()) throw DataError("no predictor specs given");
  const int n = lb.n_tasks();
  const int repeats = std::max(1, rows.repeats);

  std::vector<RowSplit> row_splits;
  for (int r = 0; r < repeats; ++r) {
    row_splits.push_back(
        make_row_split(lb.n_models(), rows.ratio, mix_seed(rows.seed, static_cast<std::uint64_t>(r))));
  }

  // rate index k-1 -> metric -> pooled samples
  std::vector<std::map<std::string, std::vector<double>>> pools(
      static_cast<std::size_t>(n - 1));
  std::vector<int> considered(static_cast<std::size_t>(n - 1), 0);
  std::vector<int> degenerate(static_cast<std::size_t>(n - 1), 0);

  static const char* kClassificationMetrics[] = {"accuracy", "f1", "precision",
                                                 "recall", "roc_auc"};
  static const char* kRegressionMetrics[] = {"mse", "rmse", "mae", "max_error", "r2"};

  for (const SplitSpec& split : candidate_splits(n, samples_per_rate, sample_seed)) {
    const std::size_t k = split.public_tasks.size() - 1;
    for (const PredictorSpec& spec : specs) {
      considered[k]++;
      // Average the metric vector over row-split repeats before pooling.
      std::map<std::string, double> sums;
      int ok = 0;
      for (const RowSplit& rs : row_splits) {
        const auto result = evaluate_split(lb, split, spec, rs);
        if (!result) continue;
        ++ok;
        const auto names = (spec.problem == Problem::classification)
                               ? std::span<const char* const>(kClassificationMetrics)
                               : std::span<const char* const>(kRegressionMetrics);
        for (const char* name : names) {
          sums[name] += *metric_value(*result, name);
        }
      }
      if (ok == 0) {
        degenerate[k]++;
        continue;
      }
      for (const auto& [name, sum] : sums) {
        pools[k][name].push_back(sum / ok);
      }
    }
  }

  CompressionProfile profile;
  for (int k = 1; k <= n - 1; ++k) {
    CompressionProfile::Rate rate;
    rate.public_size = k;
    rate.compression_rate = static_cast<double>(k) / n;
    rate.splits_considered = considered[static_cast<std::size_t>(k - 1)];
    rate.degenerate_skips = degenerate[static_cast<std::size_t>(k - 1)];
    for (const auto& [name, values] : pools[static_cast<std::size_t>(k - 1)]) {
      const Ci95 ci = ci95(values);
      rate.stats[name] = MetricStat{ci.mean, ci.low, ci.high,
                                    static_cast<int>(values.size())};
    }
    profile.rates.push_back(std::move(rate));
  }
  return profile;
}

namespace {

nlohmann::json report_to_json(const SplitResult& result, const Leaderboard& lb) {
  nlohmann::json doc;
  doc["split"] = {{"mask", result.split.mask()},
                  {"public_tasks", nlohmann::json::array()},
                  {"private_tasks", nlohmann::json::array()}};
  for (const int t : result.split.public_tasks) {
    doc["split"]["public_tasks"].push_back(lb.task_names[static_cast<std::size_t>(t)]);
  }
  for (const int t : result.split.private_tasks) {
    doc["split"]["private_tasks"].push_back(lb.task_names[static_cast<std::size_t>(t)]);
  }
  doc["compression_rate"] = round_sig(result.compression_rate);
  doc["predictor"] = {{"family", to_string(result.predictor.family)},
                      {"problem", to_string(result.predictor.problem)},
                      {"seed", result.predictor.seed}};
  if (result.classification) {
    const auto& c = *result.classification;
    doc["classification"] = {{"accuracy", round_sig(c.accuracy)},
                             {"f1", round_sig(c.f1)},
                             {"precision", round_sig(c.precision)},
                             {"recall", round_sig(c.recall)},
                             {"roc_auc", round_sig(c.roc_auc)}};
  }
  if (result.regression) {
    const auto& r = *result.regression;
    doc["regression"] = {{"mse", round_sig(r.mse)},
                         {"rmse", round_sig(r.rmse)},
                         {"mae", round_sig(r.mae)},
                         {"max_error", round_sig(r.max_error)},
                         {"r2", round_sig(r.r2)}};
  }
  return doc;
}

}  // namespace

std::string split_result_to_json(const SplitResult& result, const Leaderboard& lb) {
  return report_to_json(result, lb).dump(2) + "\n";
}

std::string profile_to_json(const CompressionProfile& profile) {
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& rate : profile.rates) {
    nlohmann::json entry;
    entry["compression_rate"] = round_sig(rate.compression_rate);
    entry["public_size"] = rate.public_size;
    entry["splits_considered"] = rate.splits_considered;
    entry["degenerate_skips"] = rate.degenerate_skips;
    nlohmann::json stats;
    for (const auto& [name, stat] : rate.stats) {
      stats[name] = {{"mean", round_sig(stat.mean)},
                     {"ci_low", round_sig(stat.ci_low)},
                     {"ci_high", round_sig(stat.ci_high)},
                     {"n_samples", stat.n_samples}};
    }
    entry["stats"] = std::move(stats);
    rates.push_back(std::move(entry));
  }
  nlohmann::json doc;
  doc["rates"] = std::move(rates);
  return doc.dump(2) + "\n";
}

}  // namespace vybench
