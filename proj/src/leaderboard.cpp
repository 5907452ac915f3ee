#include "vybench/leaderboard.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "vybench/common.hpp"

namespace vybench {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, int row, const std::string& task) {
  if (cell.empty()) {
    throw DataError("incomplete matrix: empty cell in row " + std::to_string(row) +
                    ", task '" + task + "'");
  }
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric cell '" + cell + "' in row " + std::to_string(row) +
                    ", task '" + task + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite cell in row " + std::to_string(row) + ", task '" +
                    task + "'");
  }
  return value;
}

void check_unique(const std::vector<std::string>& names, const char* kind) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      throw DataError(std::string("duplicate ") + kind + " '" + name + "'");
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

int Leaderboard::task_index(std::string_view name) const {
  for (std::size_t i = 0; i < task_names.size(); ++i) {
    if (task_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Leaderboard parse_leaderboard_csv(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    std::string_view line = bytes.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = nl + 1;
  }
  if (lines.size() < 3) {
    throw DataError("need at least 2 model rows and a header");
  }

  const auto header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "model") {
    throw DataError("first header cell must be 'model'");
  }
  if (header.size() < 3) {
    throw DataError("need at least 2 task columns");
  }

  Leaderboard lb;
  lb.task_names.assign(header.begin() + 1, header.end());
  check_unique(lb.task_names, "task");
  const int n_tasks = static_cast<int>(lb.task_names.size());
  const int n_models = static_cast<int>(lines.size()) - 1;
  lb.scores.resize(n_models, n_tasks);

  for (int r = 0; r < n_models; ++r) {
    const auto cells = split_csv_line(lines[r + 1]);
    if (static_cast<int>(cells.size()) != n_tasks + 1) {
      throw DataError("incomplete matrix: row " + std::to_string(r + 1) + " has " +
                      std::to_string(cells.size() - 1) + " cells, expected " +
                      std::to_string(n_tasks));
    }
    if (cells[0].empty()) {
      throw DataError("empty model name in row " + std::to_string(r + 1));
    }
    lb.model_names.push_back(cells[0]);
    for (int c = 0; c < n_tasks; ++c) {
      lb.scores(r, c) = parse_cell(cells[c + 1], r + 1, lb.task_names[c]);
    }
  }
  check_unique(lb.model_names, "model");
  lb.metric_name_per_task.assign(n_tasks, "score");
  return lb;
}

std::string write_leaderboard_csv(const Leaderboard& lb) {
  std::string out = "model";
  for (const auto& t : lb.task_names) {
    out += ',';
    out += t;
  }
  out += '\n';
  for (int r = 0; r < lb.n_models(); ++r) {
    out += lb.model_names[r];
    for (int c = 0; c < lb.n_tasks(); ++c) {
      out += ',';
      out += format_double(lb.scores(r, c));
    }
    out += '\n';
  }
  return out;
}

std::vector<EvaluationRecord> parse_records_json(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed records document: ") + e.what());
  }
  if (!doc.is_array()) {
    throw DataError("records document must be a top-level array");
  }

  std::vector<EvaluationRecord> records;
  int dropped = 0;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("benchmark") || !item.contains("task") ||
        !item.contains("model") || !item.contains("metrics") ||
        !item["metrics"].is_object()) {
      ++dropped;
      diag::warn("dropped malformed record (need benchmark/task/model/metrics)");
      continue;
    }
    EvaluationRecord rec;
    rec.benchmark_id = item["benchmark"].get<std::string>();
    rec.task_id = item["task"].get<std::string>();
    rec.model_id = item["model"].get<std::string>();
    if (rec.benchmark_id.empty() || rec.task_id.empty() || rec.model_id.empty()) {
      ++dropped;
      diag::warn("dropped record with empty benchmark/task/model id");
      continue;
    }
    for (const auto& [name, value] : item["metrics"].items()) {
      if (value.is_number()) {
        const double v = value.get<double>();
        if (std::isfinite(v)) rec.metrics[name] = v;
      }
    }
    if (rec.metrics.empty()) {
      ++dropped;
      diag::warn("dropped record " + rec.benchmark_id + "/" + rec.task_id + "/" +
                 rec.model_id + ": no finite real-valued metric");
      continue;
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) {
    throw DataError("zero usable records");
  }
  if (dropped > 0) {
    diag::warn("dropped " + std::to_string(dropped) + " of " +
               std::to_string(doc.size()) + " records");
  }
  return records;
}

std::vector<Leaderboard> extract_task_groups(
    std::span<const EvaluationRecord> records, int min_common_models,
    std::span<const std::string> metric_priority) {
  if (min_common_models < 2) {
    throw DataError("min_common_models must be >= 2");
  }

  // benchmark -> task -> model -> metrics (last record wins on duplicates)
  std::map<std::string, std::map<std::string, std::map<std::string, std::map<std::string, double>>>>
      by_benchmark;
  for (const auto& rec : records) {
    by_benchmark[rec.benchmark_id][rec.task_id][rec.model_id] = rec.metrics;
  }

  std::vector<Leaderboard> groups;
  int skipped = 0;
  for (const auto& [benchmark, tasks] : by_benchmark) {
    if (tasks.size() < 2) {
      ++skipped;
      continue;
    }

    // Pick one metric per task: first priority name reported by any model,
    // else the lexicographically smallest reported name.
    std::vector<std::string> task_names;
    std::vector<std::string> task_metric;
    for (const auto& [task, models] : tasks) {
      std::string chosen;
      for (const auto& want : metric_priority) {
        for (const auto& [model, metrics] : models) {
          if (metrics.count(want)) {
            chosen = want;
            break;
          }
        }
        if (!chosen.empty()) break;
      }
      if (chosen.empty()) {
        for (const auto& [model, metrics] : models) {
          for (const auto& [name, value] : metrics) {
            if (chosen.empty() || name < chosen) chosen = name;
          }
        }
      }
      task_names.push_back(task);
      task_metric.push_back(chosen);
    }

    // Models with the selected metric on every task survive.
    std::vector<std::string> survivors;
    for (const auto& [model, unused] : tasks.begin()->second) {
      bool ok = true;
      for (std::size_t t = 0; t < task_names.size(); ++t) {
        const auto& models = tasks.at(task_names[t]);
        const auto it = models.find(model);
        if (it == models.end() || !it->second.count(task_metric[t])) {
          ok = false;
          break;
        }
      }
      if (ok) survivors.push_back(model);
    }

    if (static_cast<int>(survivors.size()) < min_common_models) {
      ++skipped;
      continue;
    }

    Leaderboard lb;
    lb.model_names = survivors;
    lb.task_names = task_names;
    lb.metric_name_per_task = task_metric;
    lb.scores.resize(static_cast<int>(survivors.size()),
                     static_cast<int>(task_names.size()));
    for (std::size_t m = 0; m < survivors.size(); ++m) {
      for (std::size_t t = 0; t < task_names.size(); ++t) {
        lb.scores(static_cast<int>(m), static_cast<int>(t)) =
            tasks.at(task_names[t]).at(survivors[m]).at(task_metric[t]);
      }
    }
    groups.push_back(std::move(lb));
  }

  if (skipped > 0) {
    diag::warn("skipped " + std::to_string(skipped) + " of " +
               std::to_string(by_benchmark.size()) +
               " benchmarks (too few tasks or common models)");
  }
  return groups;
}

Leaderboard normalize_and_orient(const Leaderboard& lb,
                                 const std::map<std::string, MetricSpec>& specs) {
  if (lb.normalized) return lb;

  Leaderboard out = lb;
  out.normalization.resize(lb.n_tasks());
  for (int t = 0; t < lb.n_tasks(); ++t) {
    const auto& task = lb.task_names[t];
    MetricSpec spec;
    if (const auto it = specs.find(task); it != specs.end()) {
      spec = it->second;
    } else {
      const auto col = lb.scores.col(t);
      spec.is_percentage = (col.minCoeff() > 1.0 && col.maxCoeff() <= 100.0);
    }

    TaskAffine affine;
    if (spec.is_percentage) {
      const auto col = lb.scores.col(t);
      if (col.minCoeff() < 0.0 || col.maxCoeff() > 100.0) {
        throw DataError("task '" + task + "': percentage scores outside [0, 100]");
      }
      affine.scale = 0.01;
    } else {
      const double lo = lb.scores.col(t).minCoeff();
      const double hi = lb.scores.col(t).maxCoeff();
      if (hi - lo <= 0.0) {
        throw DataError("task '" + task +
                        "': all scores identical, cannot min-max scale");
      }
      affine.scale = 1.0 / (hi - lo);
      affine.offset = -lo / (hi - lo);
    }
    affine.flipped = (spec.orientation == MetricSpec::Orientation::lower_better);

    for (int r = 0; r < lb.n_models(); ++r) {
      double v = affine.scale * lb.scores(r, t) + affine.offset;
      if (affine.flipped) v = 1.0 - v;
      out.scores(r, t) = v;
    }
    out.normalization[t] = affine;
  }
  out.normalized = true;
  return out;
}

std::vector<std::string> validate(const Leaderboard& lb) {
  std::vector<std::string> problems;
  if (lb.n_models() < 2) problems.push_back("n_models >= 2 violated");
  if (lb.n_tasks() < 2) problems.push_back("n_tasks >= 2 violated");
  if (static_cast<int>(lb.model_names.size()) != lb.n_models()) {
    problems.push_back("model_names size does not match matrix rows");
  }
  if (static_cast<int>(lb.task_names.size()) != lb.n_tasks()) {
    problems.push_back("task_names size does not match matrix columns");
  }
  if (static_cast<int>(lb.metric_name_per_task.size()) != lb.n_tasks()) {
    problems.push_back("metric_name_per_task size does not match matrix columns");
  }

  auto report_dups = [&problems](const std::vector<std::string>& names, const char* kind) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) {
        problems.push_back(std::string("duplicate ") + kind + " '" + n + "'");
      }
    }
  };
  report_dups(lb.model_names, "model");
  report_dups(lb.task_names, "task");

  for (int r = 0; r < lb.n_models(); ++r) {
    for (int c = 0; c < lb.n_tasks(); ++c) {
      const double v = lb.scores(r, c);
      if (!std::isfinite(v)) {
        problems.push_back("non-finite score at (" + std::to_string(r) + ", " +
                           std::to_string(c) + ")");
      } else if (lb.normalized && (v < 0.0 || v > 1.0)) {
        problems.push_back("normalized score outside [0,1] at (" + std::to_string(r) +
                           ", " + std::to_string(c) + ")");
      }
    }
  }
  return problems;
}

}  // namespace vybench
