#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regedge/local_graph.hpp"

namespace regedge {

struct OrientedEdge {
  Vertex from;
  Vertex to;
  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

/// Simple d-regular graph on vertices 0..n-1 with sorted adjacency lists.
/// Immutable once constructed; switchings produce a new graph.
class RegularGraph {
 public:
  /// Validates simplicity, symmetry and regularity; throws std::invalid_argument.
  RegularGraph(int n, int d, std::vector<std::vector<Vertex>> adjacency);

  static RegularGraph from_edges(int n, int d, std::span<const std::pair<Vertex, Vertex>> edges);

  int n() const { return n_; }
  int d() const { return d_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool has_edge(Vertex u, Vertex v) const;

  /// Undirected edges as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  friend bool operator==(const RegularGraph&, const RegularGraph&) = default;

 private:
  int n_;
  int d_;
  std::vector<std::vector<Vertex>> adj_;
};

/// Both orientations of every edge; exactly n*d entries.
std::vector<OrientedEdge> directed_edges(const RegularGraph& g);

/// Vertices within distance `radius` of `centers`, with the induced edges.
struct Ball {
  std::vector<Vertex> centers;
  int radius = 0;
  std::vector<Vertex> vertices;  // BFS order
  std::vector<int> distance;     // parallel to `vertices`
  std::vector<std::pair<Vertex, Vertex>> edges;

  bool contains(Vertex v) const;
  /// Induced subgraph as a LocalGraph (targets default to d).
  LocalGraph to_local() const;
};

/// BFS ball. Vertices flagged in `blocked` (if given) are neither entered nor
/// included, which realises balls in the graph with those vertices deleted.
Ball ball(const RegularGraph& g, std::span<const Vertex> centers, int r,
          const std::vector<char>* blocked = nullptr);

/// Number of independent cycles, maximised over connected components of the
/// ball's induced subgraph. Zero iff the ball is a forest.
int excess(const Ball& b);

/// Capped BFS distance; returns -1 when dist(u, v) > cap.
int distance(const RegularGraph& g, Vertex u, Vertex v, int cap);

/// Scale parameters for the locally tree-like predicates.
struct Parameters {
  double frak_c = 0.5;
  double frak_g = 0.1;
  int R = 1;             // tree-neighbourhood radius
  int ell = 2;           // resampling radius
  int iso_radius = 2;    // radius used by the admissibility indicators

  /// R = floor((c/4) log_{d-1} n), raised to at least max(1, ell);
  /// iso_radius = max(2, floor(R/4)) unless overridden.
  static Parameters for_graph(int n, int d, int ell = 2, double frak_c = 0.5, int R_override = -1,
                              int iso_override = -1);
  void validate() const;
};

struct OmegaBarReport {
  int bad_vertex_count = 0;
  int max_excess = 0;
  double allowed_bad = 0.0;
  bool pass = false;
};

OmegaBarReport omega_bar_check(const RegularGraph& g, const Parameters& params);

/// Edges with exactly one endpoint in the ball, oriented inside -> outside,
/// ordered by BFS order of the inner endpoint then by neighbour id.
std::vector<OrientedEdge> boundary_edges(const RegularGraph& g, const Ball& t);

/// Edge-list text: "n d\n" followed by one "u v\n" per edge (u < v, sorted).
void write_edge_list(std::ostream& os, const RegularGraph& g);
RegularGraph read_edge_list(std::istream& is);
std::string to_edge_list(const RegularGraph& g);

}  // namespace regedge
