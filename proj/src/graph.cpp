#include "regedge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "regedge/errors.hpp"

namespace regedge {

RegularGraph::RegularGraph(int n, int d, std::vector<std::vector<Vertex>> adjacency)
    : n_(n), d_(d), adj_(std::move(adjacency)) {
  if (n <= 0 || d < 3 || d > n - 1) throw std::invalid_argument("need 3 <= d <= n-1");
  if ((static_cast<long long>(n) * d) % 2 != 0) throw std::invalid_argument("n*d must be even");
  if (static_cast<int>(adj_.size()) != n) throw std::invalid_argument("adjacency size mismatch");
  for (Vertex v = 0; v < n; ++v) {
    auto& nb = adj_[static_cast<std::size_t>(v)];
    std::sort(nb.begin(), nb.end());
    if (static_cast<int>(nb.size()) != d) {
      throw std::invalid_argument("vertex " + std::to_string(v) + " does not have degree " +
                                  std::to_string(d));
    }
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw std::invalid_argument("multi-edge at vertex " + std::to_string(v));
    }
    for (Vertex w : nb) {
      if (w == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(v));
      if (w < 0 || w >= n) throw std::invalid_argument("neighbour out of range");
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w : adj_[static_cast<std::size_t>(v)]) {
      if (!has_edge(w, v)) throw std::invalid_argument("adjacency is not symmetric");
    }
  }
}

RegularGraph RegularGraph::from_edges(int n, int d, std::span<const std::pair<Vertex, Vertex>> edges) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  return RegularGraph(n, d, std::move(adj));
}

bool RegularGraph::has_edge(Vertex u, Vertex v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> RegularGraph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(static_cast<std::size_t>(n_) * d_ / 2);
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<OrientedEdge> directed_edges(const RegularGraph& g) {
  std::vector<OrientedEdge> out;
  out.reserve(static_cast<std::size_t>(g.n()) * g.d());
  for (Vertex u = 0; u < g.n(); ++u) {
    for (Vertex v : g.neighbors(u)) out.push_back({u, v});
  }
  return out;
}

bool Ball::contains(Vertex v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

LocalGraph Ball::to_local() const {
  LocalGraph lg;
  for (Vertex v : vertices) lg.add_vertex(v);
  for (auto [u, v] : edges) lg.add_edge_by_label(u, v);
  return lg;
}

Ball ball(const RegularGraph& g, std::span<const Vertex> centers, int r, const std::vector<char>* blocked) {
  if (r < 0) throw std::invalid_argument("radius must be non-negative");
  if (centers.empty()) throw std::invalid_argument("ball needs at least one center");
  Ball b;
  b.centers.assign(centers.begin(), centers.end());
  b.radius = r;
  // Sparse visitation map keeps the cost proportional to the ball size.
  std::unordered_map<Vertex, int> dist;
  auto is_blocked = [&](Vertex v) { return blocked && (*blocked)[static_cast<std::size_t>(v)]; };
  for (Vertex c : centers) {
    if (is_blocked(c) || dist.count(c)) continue;
    dist.emplace(c, 0);
    b.vertices.push_back(c);
    b.distance.push_back(0);
  }
  for (std::size_t head = 0; head < b.vertices.size(); ++head) {
    const Vertex v = b.vertices[head];
    const int dv = b.distance[head];
    if (dv == r) continue;
    for (Vertex w : g.neighbors(v)) {
      if (is_blocked(w) || dist.count(w)) continue;
      dist.emplace(w, dv + 1);
      b.vertices.push_back(w);
      b.distance.push_back(dv + 1);
    }
  }
  for (Vertex v : b.vertices) {
    for (Vertex w : g.neighbors(v)) {
      if (v < w && dist.count(w)) b.edges.emplace_back(v, w);
    }
  }
  return b;
}

int excess(const Ball& b) {
  std::unordered_map<Vertex, int> idx;
  for (std::size_t i = 0; i < b.vertices.size(); ++i) idx.emplace(b.vertices[i], static_cast<int>(i));
  std::vector<int> parent(b.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> edge_count(b.vertices.size(), 0);
  for (auto [u, v] : b.edges) {
    const int a = find(idx.at(u));
    const int c = find(idx.at(v));
    if (a != c) parent[a] = c;
  }
  std::vector<int> vertex_count(b.vertices.size(), 0);
  for (std::size_t i = 0; i < b.vertices.size(); ++i) ++vertex_count[find(static_cast<int>(i))];
  for (auto [u, v] : b.edges) ++edge_count[find(idx.at(u))];
  int best = 0;
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    if (vertex_count[i] > 0) best = std::max(best, edge_count[i] - vertex_count[i] + 1);
  }
  return best;
}

int distance(const RegularGraph& g, Vertex u, Vertex v, int cap) {
  if (u == v) return 0;
  const Vertex c[1] = {u};
  const Ball b = ball(g, c, cap);
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    if (b.vertices[i] == v) return b.distance[i];
  }
  return -1;
}

Parameters Parameters::for_graph(int n, int d, int ell, double frak_c, int R_override, int iso_override) {
  require_degree(d);
  Parameters p;
  p.frak_c = frak_c;
  p.ell = ell;
  if (R_override > 0) {
    p.R = R_override;
  } else {
    const double raw = (frak_c / 4.0) * std::log(static_cast<double>(n)) / std::log(static_cast<double>(d - 1));
    p.R = std::max({1, static_cast<int>(std::floor(raw)), ell});
  }
  p.iso_radius = iso_override > 0 ? iso_override : std::max(2, p.R / 4);
  p.validate();
  return p;
}

void Parameters::validate() const {
  if (!(frak_c > 0.0 && frak_c < 1.0)) throw std::invalid_argument("frak_c must lie in (0,1)");
  if (!(frak_g > 0.0 && frak_g < 1.0)) throw std::invalid_argument("frak_g must lie in (0,1)");
  if (R < 1) throw std::invalid_argument("R must be >= 1");
  if (ell < 0) throw std::invalid_argument("ell must be >= 0");
  if (ell > R) throw std::invalid_argument("ell must not exceed R");
  if (iso_radius < 1) throw std::invalid_argument("isolation radius must be >= 1");
}

OmegaBarReport omega_bar_check(const RegularGraph& g, const Parameters& params) {
  OmegaBarReport rep;
  for (Vertex v = 0; v < g.n(); ++v) {
    const Vertex c[1] = {v};
    const int ex = excess(ball(g, c, params.R));
    if (ex > 0) ++rep.bad_vertex_count;
    rep.max_excess = std::max(rep.max_excess, ex);
  }
  rep.allowed_bad = std::pow(static_cast<double>(g.n()), params.frak_c);
  rep.pass = rep.bad_vertex_count <= rep.allowed_bad && rep.max_excess <= 1;
  return rep;
}

std::vector<OrientedEdge> boundary_edges(const RegularGraph& g, const Ball& t) {
  std::unordered_set<Vertex> inside(t.vertices.begin(), t.vertices.end());
  std::vector<OrientedEdge> out;
  for (Vertex v : t.vertices) {
    for (Vertex w : g.neighbors(v)) {
      if (!inside.count(w)) out.push_back({v, w});
    }
  }
  return out;
}

void write_edge_list(std::ostream& os, const RegularGraph& g) {
  os << g.n() << ' ' << g.d() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

std::string to_edge_list(const RegularGraph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

RegularGraph read_edge_list(std::istream& is) {
  long long n = 0, d = 0;
  if (!(is >> n >> d)) throw std::invalid_argument("edge list: missing 'N d' header");
  if (n <= 0 || n > (1LL << 30)) throw std::invalid_argument("edge list: bad vertex count");
  std::vector<std::pair<Vertex, Vertex>> edges;
  long long u = 0, v = 0;
  while (is >> u >> v) edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  if (!is.eof()) throw std::invalid_argument("edge list: malformed edge line");
  if (static_cast<long long>(edges.size()) * 2 != n * d) {
    throw std::invalid_argument("edge list: expected N*d/2 edges");
  }
  return RegularGraph::from_edges(static_cast<int>(n), static_cast<int>(d), edges);
}

}  // namespace regedge
