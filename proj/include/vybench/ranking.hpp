#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vybench/leaderboard.hpp"

namespace vybench {

// Model ranking on one task: ranks[i] is the rank of model i, 0 = best.
// Always a bijection on {0, ..., n-1}.
struct Permutation {
  std::vector<int> ranks;

  int size() const { return static_cast<int>(ranks.size()); }

  // Inverse view: order()[k] is the model holding rank k.
  std::vector<int> order() const;

  bool is_valid() const;
};

// Comparator over model indices used to order tied scores. Receives the two
// model indices; returning true places the first one ahead (better rank).
using TieBreak = std::function<bool(int, int)>;

// Rank 0 goes to the highest score; ties fall back to tie_break
// (ascending model index by default, keeping results deterministic).
Permutation ranking_from_scores(std::span<const double> scores,
                                const TieBreak& tie_break = nullptr);

// Exact inversion count |{(i,j): i<j, ranks[i]>ranks[j]}| by merge counting,
// O(n log n).
std::int64_t inversions(const Permutation& p);

// Unscaled weight: inversions of pA composed with the inverse of pB, which
// equals the number of model pairs the two tasks order oppositely.
std::int64_t discordant_pairs(const Permutation& pA, const Permutation& pB);

// Discordant pairs scaled by n(n-1)/2, so reversal distance is exactly 1.
double vygotsky_weight(const Permutation& pA, const Permutation& pB);

// Pairwise task distances. Symmetric, zero diagonal, entries in [0,1],
// satisfies the triangle inequality.
struct DistanceMatrix {
  std::vector<std::string> task_names;
  Eigen::MatrixXd values;
  int n_models = 0;

  int n_tasks() const { return static_cast<int>(task_names.size()); }
  int task_index(std::string_view name) const;
};

// Requires a normalized board (ranking is orientation-sensitive).
DistanceMatrix distance_matrix(const Leaderboard& lb);

// {"tasks": [...], "n_models": n, "matrix": [[...]]}, 12 significant digits.
std::string distance_matrix_to_json(const DistanceMatrix& dm);

}  // namespace vybench
