#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vybench {

struct MetricSpec {
  enum class Orientation { higher_better, lower_better };
  std::string name;
  Orientation orientation = Orientation::higher_better;
  bool is_percentage = false;
};

// Affine map applied to one task column during normalization, kept for
// report provenance: normalized = flipped ? 1 - (scale*raw + offset)
//                                         : scale*raw + offset.
struct TaskAffine {
  double scale = 1.0;
  double offset = 0.0;
  bool flipped = false;
};

// Complete score matrix of one benchmark: rows are models, columns tasks.
// After normalize_and_orient all scores are in [0,1] with higher = better.
struct Leaderboard {
  std::vector<std::string> model_names;
  std::vector<std::string> task_names;
  Eigen::MatrixXd scores;  // n_models x n_tasks, no missing cells
  std::vector<std::string> metric_name_per_task;
  bool normalized = false;
  std::vector<TaskAffine> normalization;  // empty until normalized

  int n_models() const { return static_cast<int>(scores.rows()); }
  int n_tasks() const { return static_cast<int>(scores.cols()); }

  // Index of a task name, or -1.
  int task_index(std::string_view name) const;
};

// One row of an evaluation-record dump: a (benchmark, task, model) triple
// with its reported metric values.
struct EvaluationRecord {
  std::string benchmark_id;
  std::string task_id;
  std::string model_id;
  std::map<std::string, double> metrics;
};

// CSV wire format: header "model,<task1>,...,<taskK>", one row per model,
// plain decimal numbers, LF or CRLF. Throws DataError on duplicates,
// missing/non-numeric cells, or fewer than 2 rows/columns.
Leaderboard parse_leaderboard_csv(std::string_view bytes);

// Inverse of parse_leaderboard_csv (shortest round-trip number formatting).
std::string write_leaderboard_csv(const Leaderboard& lb);

// Top-level JSON array of {benchmark, task, model, metrics:{name:value}}.
// Records without a single finite metric are dropped with a WARN diagnostic;
// zero usable records is a DataError.
std::vector<EvaluationRecord> parse_records_json(std::string_view bytes);

// Groups records by benchmark, keeps models evaluated on every task of the
// benchmark under the selected metric, and emits one leaderboard per
// benchmark with at least min_common_models surviving models. Per task the
// metric is the first entry of metric_priority that any model reports;
// lexicographically smallest reported metric otherwise.
std::vector<Leaderboard> extract_task_groups(
    std::span<const EvaluationRecord> records, int min_common_models,
    std::span<const std::string> metric_priority);

inline const std::vector<std::string>& default_metric_priority() {
  static const std::vector<std::string> kPriority = {"accuracy", "f1", "exact_match"};
  return kPriority;
}

// Percentage columns are divided by 100, everything else is min-max scaled
// per task, lower-better columns are flipped s -> 1-s afterwards. Tasks
// missing from `specs` default to higher_better with is_percentage inferred
// when every score lies in (1, 100]. Already-normalized boards are returned
// unchanged, which makes the operation idempotent. A constant non-percentage
// column is a DataError (its ranking would be meaningless downstream).
Leaderboard normalize_and_orient(const Leaderboard& lb,
                                 const std::map<std::string, MetricSpec>& specs);

// Human-readable invariant violations; empty means the board is valid.
std::vector<std::string> validate(const Leaderboard& lb);

}  // namespace vybench
