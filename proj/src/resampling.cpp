#include "regedge/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "regedge/analytic.hpp"
#include "regedge/errors.hpp"
#include "regedge/parallel.hpp"
#include "regedge/stats.hpp"
#include "regedge/weighted_tree.hpp"

namespace regedge {

namespace {

std::vector<char> blocked_mask(int n, const std::vector<Vertex>& vertices) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (Vertex v : vertices) mask[static_cast<std::size_t>(v)] = 1;
  return mask;
}

// Union-find over arbitrary vertex labels.
class Components {
 public:
  int find(Vertex v) {
    auto [it, inserted] = index_.emplace(v, static_cast<int>(parent_.size()));
    if (inserted) parent_.push_back(it->second);
    int x = it->second;
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // Returns false if u and v were already connected.
  bool unite(Vertex u, Vertex v) {
    const int a = find(u), b = find(v);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::unordered_map<Vertex, int> index_;
  std::vector<int> parent_;
};

bool contains_edge(const std::vector<std::vector<Vertex>>& adj, Vertex u, Vertex v) {
  const auto& a = adj[static_cast<std::size_t>(u)];
  return std::find(a.begin(), a.end(), v) != a.end();
}

void erase_edge(std::vector<std::vector<Vertex>>& adj, Vertex u, Vertex v) {
  auto& a = adj[static_cast<std::size_t>(u)];
  a.erase(std::find(a.begin(), a.end(), v));
  auto& b = adj[static_cast<std::size_t>(v)];
  b.erase(std::find(b.begin(), b.end(), u));
}

void insert_edge(std::vector<std::vector<Vertex>>& adj, Vertex u, Vertex v) {
  adj[static_cast<std::size_t>(u)].push_back(v);
  adj[static_cast<std::size_t>(v)].push_back(u);
}

bool switchable(const std::vector<std::vector<Vertex>>& adj, const Switching& s) {
  const std::array<Vertex, 4> q{s.l, s.a, s.b, s.c};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (q[i] == q[j]) return false;
    }
  }
  return contains_edge(adj, s.l, s.a) && contains_edge(adj, s.b, s.c) && !contains_edge(adj, s.l, s.c) &&
         !contains_edge(adj, s.a, s.b);
}

std::vector<std::vector<Vertex>> adjacency_of(const RegularGraph& g) {
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(g.n()));
  for (Vertex v = 0; v < g.n(); ++v) {
    const auto nb = g.neighbors(v);
    adj[static_cast<std::size_t>(v)].assign(nb.begin(), nb.end());
  }
  return adj;
}

}  // namespace

int ResamplingData::admissible_count() const {
  return static_cast<int>(std::count(admissible.begin(), admissible.end(), 1));
}

void evaluate_admissibility(const RegularGraph& g, ResamplingData& s) {
  const auto mask = blocked_mask(g.n(), s.ball);
  const int mu = s.mu();
  std::vector<std::unordered_set<Vertex>> reach(static_cast<std::size_t>(mu));
  s.admissible.assign(static_cast<std::size_t>(mu), 0);
  std::vector<char> tree_ok(static_cast<std::size_t>(mu), 0);
  for (int a = 0; a < mu; ++a) {
    const Vertex triple[3] = {s.boundary[a].to, s.sampled[a].from, s.sampled[a].to};
    const Ball b = ball(g, triple, s.iso_radius, &mask);
    reach[a].insert(b.vertices.begin(), b.vertices.end());
    // Tree condition: the ball is a forest and a, b lie in different components.
    Components comp;
    bool forest = true;
    for (auto [u, v] : b.edges) forest = forest && comp.unite(u, v);
    tree_ok[a] = forest && comp.find(triple[0]) != comp.find(triple[1]);
  }
  for (int a = 0; a < mu; ++a) {
    if (!tree_ok[a]) continue;
    bool isolated = true;
    for (int b = 0; b < mu && isolated; ++b) {
      if (b == a) continue;
      for (Vertex v : {s.boundary[b].to, s.sampled[b].from, s.sampled[b].to}) {
        if (reach[a].count(v)) {
          isolated = false;
          break;
        }
      }
    }
    s.admissible[a] = isolated;
  }
}

ResamplingData propose_with(const RegularGraph& g, Vertex o, const Parameters& params,
                            std::vector<OrientedEdge> sampled) {
  params.validate();
  if (o < 0 || o >= g.n()) throw std::out_of_range("center vertex out of range");
  ResamplingData s;
  s.center = o;
  s.ell = params.ell;
  s.iso_radius = params.iso_radius;
  const Vertex c[1] = {o};
  const Ball t = ball(g, c, params.ell);
  s.ball = t.vertices;
  s.boundary = boundary_edges(g, t);
  if (sampled.size() != s.boundary.size()) throw std::invalid_argument("one sampled edge per boundary edge required");
  const auto mask = blocked_mask(g.n(), s.ball);
  for (const auto& e : sampled) {
    if (!g.has_edge(e.from, e.to)) throw std::invalid_argument("sampled pair is not an edge");
    if (mask[static_cast<std::size_t>(e.from)] || mask[static_cast<std::size_t>(e.to)]) {
      throw std::invalid_argument("sampled edge is incident to the resampled ball");
    }
  }
  s.sampled = std::move(sampled);
  evaluate_admissibility(g, s);
  return s;
}

ResamplingData propose(const RegularGraph& g, Vertex o, const Parameters& params, Rng& rng) {
  const Vertex c[1] = {o};
  const Ball t = ball(g, c, params.ell);
  const auto mask = blocked_mask(g.n(), t.vertices);
  const std::size_t mu = boundary_edges(g, t).size();
  bool any = false;
  for (Vertex v = 0; v < g.n() && !any; ++v) {
    if (mask[static_cast<std::size_t>(v)]) continue;
    for (Vertex w : g.neighbors(v)) any = any || !mask[static_cast<std::size_t>(w)];
  }
  if (!any) throw std::invalid_argument("graph has no edge outside the resampled ball");
  // Uniform oriented edge of G, rejected if incident to T.
  const auto slots = static_cast<std::uint64_t>(g.n()) * static_cast<std::uint64_t>(g.d());
  std::vector<OrientedEdge> sampled;
  sampled.reserve(mu);
  while (sampled.size() < mu) {
    const auto k = uniform_index(rng, slots);
    const auto from = static_cast<Vertex>(k / static_cast<std::uint64_t>(g.d()));
    const Vertex to = g.neighbors(from)[k % static_cast<std::uint64_t>(g.d())];
    if (mask[static_cast<std::size_t>(from)] || mask[static_cast<std::size_t>(to)]) continue;
    sampled.push_back({from, to});
  }
  return propose_with(g, o, params, std::move(sampled));
}

SwitchResult apply(const RegularGraph& g, const ResamplingData& s) {
  auto adj = adjacency_of(g);
  std::vector<int> applied, skipped;
  for (int a = 0; a < s.mu(); ++a) {
    if (!s.admissible[a]) continue;
    const Switching sw{s.boundary[a].from, s.boundary[a].to, s.sampled[a].from, s.sampled[a].to};
    if (!switchable(adj, sw)) {
      skipped.push_back(a);
      continue;
    }
    erase_edge(adj, sw.l, sw.a);
    erase_edge(adj, sw.b, sw.c);
    insert_edge(adj, sw.l, sw.c);
    insert_edge(adj, sw.a, sw.b);
    applied.push_back(a);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return {RegularGraph(g.n(), g.d(), std::move(adj)), std::move(applied), std::move(skipped)};
}

ResamplingData reverse(const ResamplingData& s, const std::vector<int>& applied) {
  ResamplingData r = s;
  std::fill(r.admissible.begin(), r.admissible.end(), 0);
  for (int a : applied) {
    const Vertex l = s.boundary[a].from, av = s.boundary[a].to, b = s.sampled[a].from, c = s.sampled[a].to;
    r.boundary[a] = {l, c};
    r.sampled[a] = {b, av};
    r.admissible[a] = 1;
  }
  return r;
}

Eigen::MatrixXcd xi_sum(const std::vector<Switching>& switchings, const std::vector<Vertex>& rows, int d) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd xi = Eigen::MatrixXcd::Zero(m, m);
  auto at = [&](Vertex v) {
    auto it = std::lower_bound(rows.begin(), rows.end(), v);
    if (it == rows.end() || *it != v) throw std::out_of_range("switching vertex outside the row set");
    return static_cast<Eigen::Index>(it - rows.begin());
  };
  const double w = 1.0 / std::sqrt(static_cast<double>(d - 1));
  auto add = [&](Vertex x, Vertex y, double sign) {
    xi(at(x), at(y)) += sign * w;
    xi(at(y), at(x)) += sign * w;
  };
  for (const auto& s : switchings) {
    add(s.l, s.a, 1.0);
    add(s.b, s.c, 1.0);
    add(s.l, s.c, -1.0);
    add(s.a, s.b, -1.0);
  }
  return xi;
}

int SwitchOperator::index_of(Vertex v) const {
  auto it = std::lower_bound(forest.begin(), forest.end(), v);
  if (it == forest.end() || *it != v) throw std::out_of_range("vertex outside the local forest");
  return static_cast<int>(it - forest.begin());
}

WoodburyResult woodbury_f(const RegularGraph& g, const ResamplingData& s, const SpectralPoint<>& p) {
  WoodburyResult out;
  SwitchOperator op;
  auto adj = adjacency_of(g);
  for (int a = 0; a < s.mu(); ++a) {
    if (!s.admissible[a]) continue;
    const Switching sw{s.boundary[a].from, s.boundary[a].to, s.sampled[a].from, s.sampled[a].to};
    if (!switchable(adj, sw)) {
      out.skip_reason = "switching " + std::to_string(a) + " fails the defensive edge check";
      return out;
    }
    op.switchings.push_back(sw);
  }

  std::vector<std::pair<Vertex, Vertex>> edges, edges_tilde;
  const Vertex c[1] = {s.center};
  for (auto e : ball(g, c, s.ell).edges) {
    edges.push_back(e);
    edges_tilde.push_back(e);
  }
  std::vector<char> switched(static_cast<std::size_t>(s.mu()), 0);
  for (int a = 0; a < s.mu(); ++a) {
    switched[a] = s.admissible[a];
    edges.emplace_back(s.boundary[a].from, s.boundary[a].to);
    if (!switched[a]) edges_tilde.emplace_back(s.boundary[a].from, s.boundary[a].to);
  }
  for (const auto& sw : op.switchings) {
    edges.emplace_back(sw.b, sw.c);
    edges_tilde.emplace_back(sw.l, sw.c);
    edges_tilde.emplace_back(sw.a, sw.b);
  }

  Components comp;
  for (auto [u, v] : edges) {
    if (!comp.unite(u, v)) {
      out.skip_reason = "local forest F+ contains a cycle";
      return out;
    }
  }

  for (auto [u, v] : edges) {
    op.forest.push_back(u);
    op.forest.push_back(v);
  }
  std::sort(op.forest.begin(), op.forest.end());
  op.forest.erase(std::unique(op.forest.begin(), op.forest.end()), op.forest.end());
  for (const auto& sw : op.switchings) {
    for (Vertex v : {sw.l, sw.a, sw.b, sw.c}) op.support.push_back(v);
  }
  std::sort(op.support.begin(), op.support.end());
  op.support.erase(std::unique(op.support.begin(), op.support.end()), op.support.end());

  auto local = [&](const std::vector<std::pair<Vertex, Vertex>>& list) {
    LocalGraph lg;
    for (Vertex v : op.forest) lg.add_vertex(v);
    for (auto [u, v] : list) lg.add_edge_by_label(u, v);
    return lg;
  };
  const auto msc = stieltjes_semicircle(p);
  op.L = WeightedTreeOperator<double>(local(edges), g.d(), p, msc).matrix();
  op.L_tilde = WeightedTreeOperator<double>(local(edges_tilde), g.d(), p, msc).matrix();

  const Eigen::MatrixXcd xi = xi_sum(op.switchings, op.forest, g.d());
  op.F = xi + xi * op.L_tilde * xi;

  const auto m = static_cast<Eigen::Index>(op.forest.size());
  const auto r = static_cast<Eigen::Index>(4 * op.switchings.size());
  if (r == 0) {
    op.F_woodbury = Eigen::MatrixXcd::Zero(m, m);
  } else {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(m, r);
    Eigen::MatrixXcd vt = Eigen::MatrixXcd::Zero(r, m);
    for (std::size_t k = 0; k < op.switchings.size(); ++k) {
      const auto& sw = op.switchings[k];
      const Eigen::MatrixXcd xi_k = xi_sum({sw}, op.forest, g.d());
      const std::array<Vertex, 4> quad{sw.l, sw.a, sw.b, sw.c};
      for (int j = 0; j < 4; ++j) {
        const auto col = static_cast<Eigen::Index>(4 * k + j);
        const int row = op.index_of(quad[j]);
        u(row, col) = 1.0;
        vt.row(col) = -xi_k.row(row);
      }
    }
    const Eigen::MatrixXcd inner = Eigen::MatrixXcd::Identity(r, r) + vt * op.L * u;
    op.F_woodbury = -u * inner.partialPivLu().solve(vt);
  }
  op.identity_residual = (op.F - op.F_woodbury).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const bool in_i = std::binary_search(op.support.begin(), op.support.end(), op.forest[i]);
      const bool in_j = std::binary_search(op.support.begin(), op.support.end(), op.forest[j]);
      if (!in_i || !in_j) op.support_leak = std::max(op.support_leak, std::abs(op.F(i, j)));
    }
  }
  out.op = std::move(op);
  return out;
}

ExpansionReport resolvent_update_expansion(const ResolventCache& g, const ResolventCache& g_tilde,
                                           const SwitchOperator& op, int k_max,
                                           const std::vector<std::pair<Vertex, Vertex>>& entries) {
  if (k_max < 0) throw std::invalid_argument("K must be non-negative");
  if (g.point().z() != g_tilde.point().z()) throw std::invalid_argument("resolvents at different spectral points");
  ExpansionReport rep;
  rep.max_error.assign(static_cast<std::size_t>(k_max + 1), 0.0);
  rep.increment.assign(static_cast<std::size_t>(k_max + 1), 0.0);
  const auto s = static_cast<Eigen::Index>(op.support.size());
  if (s == 0) {
    for (auto [x, y] : entries) {
      const double e = std::abs(g_tilde.entry(x, y) - g.entry(x, y));
      rep.exact_norm = std::max(rep.exact_norm, e);
      for (auto& v : rep.max_error) v = std::max(v, e);
    }
    return rep;
  }
  std::vector<int> fidx(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) fidx[i] = op.index_of(op.support[i]);
  Eigen::MatrixXcd f(s, s), g_circ(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      f(i, j) = op.F(fidx[i], fidx[j]);
      g_circ(i, j) = g.entry(op.support[i], op.support[j]) - op.L(fidx[i], fidx[j]);
    }
  }
  const auto e = static_cast<Eigen::Index>(entries.size());
  Eigen::MatrixXcd left(e, s), right(s, e);
  Eigen::VectorXcd exact(e), partial = Eigen::VectorXcd::Zero(e);
  for (Eigen::Index k = 0; k < e; ++k) {
    const auto [x, y] = entries[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < s; ++i) {
      left(k, i) = g.entry(x, op.support[i]);
      right(i, k) = g.entry(op.support[i], y);
    }
    exact(k) = g_tilde.entry(x, y) - g.entry(x, y);
  }
  rep.exact_norm = e ? exact.cwiseAbs().maxCoeff() : 0.0;
  Eigen::MatrixXcd r = f * right;
  for (int k = 0; k <= k_max; ++k) {
    const Eigen::VectorXcd term = left.cwiseProduct(r.transpose()).rowwise().sum();
    partial += term;
    rep.increment[k] = e ? term.cwiseAbs().maxCoeff() : 0.0;
    rep.max_error[k] = e ? (partial - exact).cwiseAbs().maxCoeff() : 0.0;
    r = f * (g_circ * r);
  }
  rep.diverging = k_max > 0 && rep.increment.back() > rep.increment.front();
  return rep;
}

double second_eigenvalue(const RegularGraph& g) {
  const Eigen::VectorXd ev = eigenvalues(NormalizedAdjacency(g));
  return ev(1);
}

double triangle_count(const RegularGraph& g) {
  long long count = 0;
  for (Vertex u = 0; u < g.n(); ++u) {
    for (Vertex v : g.neighbors(u)) {
      if (v <= u) continue;
      for (Vertex w : g.neighbors(v)) {
        if (w > v && g.has_edge(u, w)) ++count;
      }
    }
  }
  return static_cast<double>(count);
}

GraphStatistic statistic_by_name(const std::string& name) {
  if (name == "lambda2") return second_eigenvalue;
  if (name == "triangles") return triangle_count;
  if (name == "degree0") return [](const RegularGraph& g) { return static_cast<double>(g.neighbors(0).size()); };
  if (name == "edge01") return [](const RegularGraph& g) { return g.has_edge(0, 1) ? 1.0 : 0.0; };
  throw std::invalid_argument("unknown statistic '" + name + "'");
}

ExchangeabilityReport exchangeability_test(const SamplerConfig& cfg, int ell, const GraphStatistic& f, int samples,
                                           std::optional<Parameters> params) {
  if (samples < 2) throw std::invalid_argument("exchangeability test needs at least two samples");
  cfg.validate();
  const Parameters prm = params ? *params : Parameters::for_graph(cfg.n, cfg.d, ell);
  ExchangeabilityReport rep;
  rep.samples = samples;
  rep.f_original.resize(static_cast<std::size_t>(samples));
  rep.f_switched.resize(static_cast<std::size_t>(samples));
  std::vector<double> admissible(static_cast<std::size_t>(samples));
  std::vector<int> violations(static_cast<std::size_t>(samples), 0);
  parallel_for(samples, [&](int k) {
    Rng rg = make_stream(cfg.seed, static_cast<std::uint64_t>(k), 0);
    const RegularGraph g = sample(cfg, rg);
    Rng rs = make_stream(cfg.seed, static_cast<std::uint64_t>(k), 1);
    const auto o = static_cast<Vertex>(uniform_index(rs, static_cast<std::uint64_t>(g.n())));
    const ResamplingData s = propose(g, o, prm, rs);
    admissible[k] = s.mu() ? static_cast<double>(s.admissible_count()) / s.mu() : 0.0;
    try {
      const SwitchResult res = apply(g, s);
      rep.f_original[k] = f(g);
      rep.f_switched[k] = f(res.graph);
      if (res.graph.edges().size() != g.edges().size()) violations[k] = 1;
    } catch (const std::invalid_argument&) {
      violations[k] = 1;
      rep.f_original[k] = rep.f_switched[k] = f(g);
    }
  });
  rep.degree_violations = std::accumulate(violations.begin(), violations.end(), 0);
  rep.mean_admissible = stats::mean(admissible);
  const auto ks = stats::ks_two_sample(rep.f_original, rep.f_switched);
  rep.ks_statistic = ks.statistic;
  rep.ks_p_value = ks.p_value;
  std::vector<double> diff(static_cast<std::size_t>(samples));
  int pos = 0, neg = 0;
  for (int k = 0; k < samples; ++k) {
    diff[k] = rep.f_switched[k] - rep.f_original[k];
    pos += diff[k] > 0;
    neg += diff[k] < 0;
  }
  rep.sign_p_value = stats::sign_test(pos, neg);
  const double se = std::sqrt(stats::variance(diff) / samples);
  rep.mean_diff_sigma = se > 0 ? std::abs(stats::mean(diff)) / se : 0.0;
  return rep;
}

}  // namespace regedge
