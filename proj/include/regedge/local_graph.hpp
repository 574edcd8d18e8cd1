#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace regedge {

using Vertex = std::int32_t;

/// Small labelled graph used for local Green's function computations.
///
/// Vertices carry a global label (e.g. the vertex id in a RegularGraph) and a
/// target degree. A vertex whose degree in this graph falls short of its
/// target receives the boundary weight for each missing neighbour. The target
/// defaults to d; the root of a rooted (d-1)-ary tree uses d-1.
class LocalGraph {
 public:
  int add_vertex(Vertex label, std::optional<int> target_degree = std::nullopt) {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    const int idx = static_cast<int>(labels_.size());
    labels_.push_back(label);
    adj_.emplace_back();
    target_.push_back(target_degree);
    index_.emplace(label, idx);
    return idx;
  }

  /// Adds an undirected edge between two local indices; duplicates are ignored.
  void add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("local graph does not allow self-loops");
    for (int w : adj_.at(u)) {
      if (w == v) return;
    }
    adj_.at(u).push_back(v);
    adj_.at(v).push_back(u);
  }

  void add_edge_by_label(Vertex a, Vertex b) { add_edge(add_vertex(a), add_vertex(b)); }

  int size() const { return static_cast<int>(labels_.size()); }
  Vertex label(int idx) const { return labels_.at(idx); }
  std::span<const Vertex> labels() const { return labels_; }
  const std::vector<int>& neighbors(int idx) const { return adj_.at(idx); }
  int degree(int idx) const { return static_cast<int>(adj_.at(idx).size()); }
  int target_degree(int idx, int d) const { return target_.at(idx).value_or(d); }
  void set_target_degree(int idx, int t) { target_.at(idx) = t; }

  std::optional<int> index_of(Vertex label) const {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    return std::nullopt;
  }

  int edge_count() const {
    int twice = 0;
    for (const auto& a : adj_) twice += static_cast<int>(a.size());
    return twice / 2;
  }

 private:
  std::vector<Vertex> labels_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::optional<int>> target_;
  std::unordered_map<Vertex, int> index_;
};

/// Truncated rooted tree with parent/depth bookkeeping; vertex 0 is the root.
struct RootedTree {
  LocalGraph graph;
  std::vector<int> parent;
  std::vector<int> depth;
};

/// Radius-ell ball of the infinite d-regular tree (root has d children).
inline RootedTree truncated_regular_tree(int d, int ell) {
  RootedTree t;
  t.graph.add_vertex(0);
  t.parent.push_back(-1);
  t.depth.push_back(0);
  std::vector<int> frontier{0};
  for (int level = 1; level <= ell; ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      const int children = (v == 0) ? d : d - 1;
      for (int c = 0; c < children; ++c) {
        const int w = t.graph.add_vertex(static_cast<Vertex>(t.graph.size()));
        t.graph.add_edge(v, w);
        t.parent.push_back(v);
        t.depth.push_back(level);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return t;
}

/// Radius-ell ball of the infinite rooted (d-1)-ary tree. The root has target
/// degree d-1, so it receives no boundary weight.
inline RootedTree truncated_ary_tree(int d, int ell) {
  RootedTree t;
  t.graph.add_vertex(0, d - 1);
  t.parent.push_back(-1);
  t.depth.push_back(0);
  std::vector<int> frontier{0};
  for (int level = 1; level <= ell; ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      for (int c = 0; c < d - 1; ++c) {
        const int w = t.graph.add_vertex(static_cast<Vertex>(t.graph.size()));
        t.graph.add_edge(v, w);
        t.parent.push_back(v);
        t.depth.push_back(level);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return t;
}

}  // namespace regedge
