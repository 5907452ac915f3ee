#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vybench/ranking.hpp"

namespace vybench {

// Tree edge with endpoints ordered u < v lexicographically by task name.
struct TreeEdge {
  std::string u;
  std::string v;
  double weight = 0.0;
};

struct SpanningTree {
  std::vector<std::string> task_names;
  std::vector<TreeEdge> edges;  // n-1 edges, in the order Kruskal accepted them
};

// Path bounds between two vertices: lower is the heaviest edge on the tree
// path (an exchange argument bound), upper is the path weight sum (triangle
// inequality bound). lower <= true distance <= upper.
struct PathBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Kruskal with equal-weight edges processed in lexicographic (u, v)
// task-name order, so identical inputs always give identical trees.
SpanningTree mst(const DistanceMatrix& dm);

PathBounds path_bounds(const SpanningTree& tree, const std::string& u,
                       const std::string& v, const DistanceMatrix& dm);

// k closest tasks to `task`, ascending by weight, ties by task name.
std::vector<std::pair<std::string, double>> nearest_tasks(const DistanceMatrix& dm,
                                                          const std::string& task,
                                                          int k);

// Deterministic DOT text: vertices by task name, edge labels with exactly
// two decimals, edges in stored order.
std::string export_dot(const SpanningTree& tree);

// {"tasks": [...], "edges": [{"u", "v", "weight"}]}, 12 significant digits.
std::string tree_to_json(const SpanningTree& tree);

}  // namespace vybench
