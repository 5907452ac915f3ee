#include "vybench/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vybench/common.hpp"

namespace vybench {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

std::string quote_dot(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

SpanningTree mst(const DistanceMatrix& dm) {
  const int n = dm.n_tasks();
  if (n < 2) throw DataError("mst requires at least 2 tasks");

  struct Candidate {
    double w;
    std::string u, v;  // u < v lexicographically
    int ui, vi;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = dm.task_names[static_cast<std::size_t>(i)];
      const auto& b = dm.task_names[static_cast<std::size_t>(j)];
      if (a <= b) {
        candidates.push_back({dm.values(i, j), a, b, i, j});
      } else {
        candidates.push_back({dm.values(i, j), b, a, j, i});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  SpanningTree tree;
  tree.task_names = dm.task_names;
  UnionFind uf(n);
  for (const auto& c : candidates) {
    if (uf.unite(c.ui, c.vi)) {
      tree.edges.push_back({c.u, c.v, c.w});
      if (static_cast<int>(tree.edges.size()) == n - 1) break;
    }
  }
  return tree;
}

namespace {

int tree_vertex_index(const SpanningTree& tree, const std::string& name) {
  for (std::size_t i = 0; i < tree.task_names.size(); ++i) {
    if (tree.task_names[i] == name) return static_cast<int>(i);
  }
  throw DataError("unknown task '" + name + "'");
}

// Edge weights along the unique tree path from u to v.
std::vector<double> path_edge_weights(const SpanningTree& tree, const std::string& u,
                                      const std::string& v) {
  const int n = static_cast<int>(tree.task_names.size());
  const int src = tree_vertex_index(tree, u);
  const int dst = tree_vertex_index(tree, v);

  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& e : tree.edges) {
    const int a = tree_vertex_index(tree, e.u);
    const int b = tree_vertex_index(tree, e.v);
    adj[static_cast<std::size_t>(a)].push_back({b, e.weight});
    adj[static_cast<std::size_t>(b)].push_back({a, e.weight});
  }

  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<double> parent_weight(static_cast<std::size_t>(n), 0.0);
  std::vector<int> stack = {src};
  parent[static_cast<std::size_t>(src)] = src;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (cur == dst) break;
    for (const auto& [next, w] : adj[static_cast<std::size_t>(cur)]) {
      if (parent[static_cast<std::size_t>(next)] == -1) {
        parent[static_cast<std::size_t>(next)] = cur;
        parent_weight[static_cast<std::size_t>(next)] = w;
        stack.push_back(next);
      }
    }
  }
  if (parent[static_cast<std::size_t>(dst)] == -1) {
    throw DataError("tree is not connected");
  }

  std::vector<double> weights;
  for (int cur = dst; cur != src; cur = parent[static_cast<std::size_t>(cur)]) {
    weights.push_back(parent_weight[static_cast<std::size_t>(cur)]);
  }
  return weights;
}

}  // namespace

PathBounds path_bounds(const SpanningTree& tree, const std::string& u,
                       const std::string& v, const DistanceMatrix& dm) {
  if (u == v) throw DataError("path_bounds requires two distinct tasks");
  const auto weights = path_edge_weights(tree, u, v);

  PathBounds bounds;
  for (const double w : weights) {
    bounds.lower = std::max(bounds.lower, w);
    bounds.upper += w;
  }

  const int i = dm.task_index(u);
  const int j = dm.task_index(v);
  if (i >= 0 && j >= 0) {
    const double direct = dm.values(i, j);
    // Sandwich property; holds because dm is a metric and tree a true MST.
    assert(bounds.lower <= direct + 1e-12 && direct <= bounds.upper + 1e-12);
    (void)direct;
  }
  return bounds;
}

std::vector<std::pair<std::string, double>> nearest_tasks(const DistanceMatrix& dm,
                                                          const std::string& task,
                                                          int k) {
  const int t = dm.task_index(task);
  if (t < 0) throw DataError("unknown task '" + task + "'");
  if (k < 1 || k > dm.n_tasks() - 1) {
    throw DataError("k must be in [1, n_tasks - 1]");
  }

  std::vector<std::pair<std::string, double>> others;
  for (int i = 0; i < dm.n_tasks(); ++i) {
    if (i == t) continue;
    others.push_back({dm.task_names[static_cast<std::size_t>(i)], dm.values(t, i)});
  }
  std::sort(others.begin(), others.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  others.resize(static_cast<std::size_t>(k));
  return others;
}

std::string export_dot(const SpanningTree& tree) {
  std::string out = "graph benchmark {\n  node [shape=box];\n";
  for (const auto& name : tree.task_names) {
    out += "  " + quote_dot(name) + ";\n";
  }
  for (const auto& e : tree.edges) {
    char label[32];
    std::snprintf(label, sizeof(label), "%.2f", e.weight);
    out += "  " + quote_dot(e.u) + " -- " + quote_dot(e.v) + " [label=\"" + label +
           "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string tree_to_json(const SpanningTree& tree) {
  nlohmann::json doc;
  doc["tasks"] = tree.task_names;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : tree.edges) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"weight", round_sig(e.weight)}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

}  // namespace vybench
