#include "vybench/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vybench/common.hpp"

namespace vybench {

std::vector<int> Permutation::order() const {
  std::vector<int> inv(ranks.size());
  for (std::size_t model = 0; model < ranks.size(); ++model) {
    inv[static_cast<std::size_t>(ranks[model])] = static_cast<int>(model);
  }
  return inv;
}

bool Permutation::is_valid() const {
  const int n = size();
  if (n < 2) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const int r : ranks) {
    if (r < 0 || r >= n || seen[static_cast<std::size_t>(r)]) return false;
    seen[static_cast<std::size_t>(r)] = true;
  }
  return true;
}

Permutation ranking_from_scores(std::span<const double> scores,
                                const TieBreak& tie_break) {
  const int n = static_cast<int>(scores.size());
  if (n < 2) throw DataError("need >= 2 models to rank");
  for (const double s : scores) {
    if (!std::isfinite(s)) throw DataError("non-finite score in ranking input");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    }
    return tie_break ? tie_break(a, b) : a < b;
  });

  Permutation p;
  p.ranks.resize(static_cast<std::size_t>(n));
  for (int rank = 0; rank < n; ++rank) {
    p.ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = rank;
  }
  return p;
}

namespace {

// Merge-count on a working copy; counts pairs out of order.
std::int64_t merge_count(std::vector<int>& v, std::vector<int>& tmp, int lo, int hi) {
  if (hi - lo < 2) return 0;
  const int mid = lo + (hi - lo) / 2;
  std::int64_t count = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  int a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[static_cast<std::size_t>(a)] <= v[static_cast<std::size_t>(b)]) {
      tmp[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(a++)];
    } else {
      count += mid - a;
      tmp[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(b++)];
    }
  }
  while (a < mid) tmp[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(a++)];
  while (b < hi) tmp[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(b++)];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return count;
}

std::int64_t count_inversions(std::vector<int> seq) {
  std::vector<int> tmp(seq.size());
  return merge_count(seq, tmp, 0, static_cast<int>(seq.size()));
}

}  // namespace

std::int64_t inversions(const Permutation& p) {
  if (!p.is_valid()) throw DataError("invalid permutation");
  return count_inversions(p.ranks);
}

std::int64_t discordant_pairs(const Permutation& pA, const Permutation& pB) {
  if (!pA.is_valid() || !pB.is_valid()) throw DataError("invalid permutation");
  if (pA.size() != pB.size()) {
    throw DataError("permutation length mismatch: " + std::to_string(pA.size()) +
                    " vs " + std::to_string(pB.size()));
  }
  // (pA o pB^-1)[k] = rank under A of the model holding rank k under B.
  const std::vector<int> order_b = pB.order();
  std::vector<int> composed(order_b.size());
  for (std::size_t k = 0; k < order_b.size(); ++k) {
    composed[k] = pA.ranks[static_cast<std::size_t>(order_b[k])];
  }
  return count_inversions(std::move(composed));
}

double vygotsky_weight(const Permutation& pA, const Permutation& pB) {
  const std::int64_t n = pA.size();
  const std::int64_t pairs = n * (n - 1) / 2;
  return static_cast<double>(discordant_pairs(pA, pB)) / static_cast<double>(pairs);
}

int DistanceMatrix::task_index(std::string_view name) const {
  for (std::size_t i = 0; i < task_names.size(); ++i) {
    if (task_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

DistanceMatrix distance_matrix(const Leaderboard& lb) {
  if (!lb.normalized) {
    throw DataError("distance_matrix requires a normalized leaderboard");
  }
  const auto problems = validate(lb);
  if (!problems.empty()) {
    throw DataError("invalid leaderboard: " + problems.front());
  }

  const int n_tasks = lb.n_tasks();
  std::vector<Permutation> rankings;
  rankings.reserve(static_cast<std::size_t>(n_tasks));
  for (int t = 0; t < n_tasks; ++t) {
    const Eigen::VectorXd col = lb.scores.col(t);
    rankings.push_back(ranking_from_scores({col.data(), static_cast<std::size_t>(col.size())}));
  }

  DistanceMatrix dm;
  dm.task_names = lb.task_names;
  dm.n_models = lb.n_models();
  dm.values = Eigen::MatrixXd::Zero(n_tasks, n_tasks);
  for (int i = 0; i < n_tasks; ++i) {
    for (int j = i + 1; j < n_tasks; ++j) {
      const double w = vygotsky_weight(rankings[static_cast<std::size_t>(i)],
                                       rankings[static_cast<std::size_t>(j)]);
      dm.values(i, j) = w;
      dm.values(j, i) = w;
    }
  }
  return dm;
}

std::string distance_matrix_to_json(const DistanceMatrix& dm) {
  nlohmann::json doc;
  doc["tasks"] = dm.task_names;
  doc["n_models"] = dm.n_models;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < dm.n_tasks(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < dm.n_tasks(); ++j) {
      row.push_back(round_sig(dm.values(i, j)));
    }
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace vybench
