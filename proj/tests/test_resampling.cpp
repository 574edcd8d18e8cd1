#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "regedge/analytic.hpp"
#include "regedge/resampling.hpp"
#include "regedge/samplers.hpp"

using namespace regedge;

namespace {

RegularGraph cubic(int n, std::uint64_t seed) {
  return sample_indexed(SamplerConfig{n, 3, Model::UniformPairing, seed}, 0);
}

RegularGraph petersen() {
  const std::vector<std::pair<Vertex, Vertex>> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 5}, {1, 6}, {2, 7},
                                                 {3, 8}, {4, 9}, {5, 7}, {7, 9}, {6, 9}, {6, 8}, {5, 8}};
  return RegularGraph::from_edges(10, 3, e);
}

/// First proposal (over vertices and streams) with exactly `want` admissible switchings.
ResamplingData find_proposal(const RegularGraph& g, const Parameters& params, int want, std::uint64_t seed) {
  for (std::uint64_t k = 0;; ++k) {
    Rng rng = make_stream(seed, k);
    const auto o = static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(g.n())));
    auto s = propose(g, o, params, rng);
    if (s.admissible_count() == want) return s;
  }
}

}  // namespace

TEST_CASE("proposal structure") {
  const auto g = cubic(2000, 1);
  const auto params = Parameters::for_graph(2000, 3, 2);
  Rng rng = make_stream(3, 0);
  for (Vertex o : {0, 10, 500}) {
    const auto s = propose(g, o, params, rng);
    const Vertex c[] = {o};
    if (excess(ball(g, c, 3)) == 0) CHECK(s.mu() == 12);
    CHECK(s.sampled.size() == s.boundary.size());
    std::set<Vertex> t(s.ball.begin(), s.ball.end());
    for (const auto& e : s.sampled) {
      CHECK(g.has_edge(e.from, e.to));
      CHECK_FALSE(t.count(e.from));
      CHECK_FALSE(t.count(e.to));
    }
    for (const auto& e : s.boundary) {
      CHECK(t.count(e.from));
      CHECK_FALSE(t.count(e.to));
    }
  }
  Parameters p0 = params;
  p0.ell = 0;
  CHECK(propose(g, 7, p0, rng).mu() == 3);
}

TEST_CASE("repeated sampled edges are permitted") {
  const auto g = cubic(500, 2);
  const auto params = Parameters::for_graph(500, 3, 1);
  const Vertex c[] = {0};
  const auto t = ball(g, c, 1);
  Vertex far = 0;
  while (distance(g, 0, far, 4) >= 0) ++far;
  const OrientedEdge e{far, g.neighbors(far)[0]};
  const std::vector<OrientedEdge> same(boundary_edges(g, t).size(), e);
  const auto s = propose_with(g, 0, params, same);
  CHECK(s.sampled.size() == same.size());
  // Shared triples are never isolated from one another.
  CHECK(s.admissible_count() == 0);
  CHECK_THROWS_AS(propose_with(g, 0, params, {}), std::invalid_argument);
}

TEST_CASE("admissible fraction at N = 2000 with isolation radius R/4") {
  const auto g = cubic(2000, 5);
  const auto params = Parameters::for_graph(2000, 3, 1, 0.5, 4, 1);
  double total = 0.0;
  for (int k = 0; k < 100; ++k) {
    Rng rng = make_stream(11, static_cast<std::uint64_t>(k));
    const auto o = static_cast<Vertex>(uniform_index(rng, 2000));
    const auto s = propose(g, o, params, rng);
    total += static_cast<double>(s.admissible_count()) / s.mu();
  }
  MESSAGE("admissible fraction " << total / 100.0);
  CHECK(total / 100.0 >= 0.9);
}

TEST_CASE("hand-checked switching on the Petersen graph") {
  const auto g = petersen();
  ResamplingData s;
  s.boundary = {{0, 1}};
  s.sampled = {{7, 9}};
  s.admissible = {1};
  const auto r = apply(g, s);
  CHECK(r.applied == std::vector<int>{0});
  const std::vector<std::pair<Vertex, Vertex>> expected{{0, 4}, {0, 5}, {0, 9}, {1, 2}, {1, 6}, {1, 7},
                                                        {2, 3}, {2, 7}, {3, 4}, {3, 8}, {4, 9}, {5, 7},
                                                        {5, 8}, {6, 8}, {6, 9}};
  CHECK(r.graph.edges() == expected);

  s.admissible = {0};
  CHECK(apply(g, s).graph == g);

  // {0,1},{1,2} shares a vertex, so the defensive check skips it.
  s.sampled = {{1, 2}};
  s.admissible = {1};
  const auto bad = apply(g, s);
  CHECK(bad.skipped == std::vector<int>{0});
  CHECK(bad.graph == g);
}

TEST_CASE("switchings preserve degrees and invert") {
  const auto g = cubic(400, 6);
  const auto params = Parameters::for_graph(400, 3, 1, 0.5, 2);
  const double w = 1.0 / std::sqrt(2.0);
  const Eigen::MatrixXd h = oracle::normalized_adjacency(g);
  for (int k = 0; k < 40; ++k) {
    Rng rng = make_stream(21, static_cast<std::uint64_t>(k));
    const auto o = static_cast<Vertex>(uniform_index(rng, 400));
    const auto s = propose(g, o, params, rng);
    const auto r = apply(g, s);
    CHECK(r.graph.edges().size() == g.edges().size());
    const Eigen::MatrixXd diff = oracle::normalized_adjacency(r.graph) - h;
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
      const double x = std::abs(diff.data()[i]);
      CHECK((x == 0.0 || std::abs(x - w) < 1e-15));
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(diff);
    CHECK(lu.rank() <= 4 * static_cast<int>(r.applied.size()));

    std::vector<Switching> sw;
    for (int a : r.applied) sw.push_back({s.boundary[a].from, s.boundary[a].to, s.sampled[a].from, s.sampled[a].to});
    std::vector<Vertex> all(400);
    for (int i = 0; i < 400; ++i) all[i] = i;
    CHECK((diff.cast<Complex>() + xi_sum(sw, all, 3)).cwiseAbs().maxCoeff() < 1e-15);

    const auto back = apply(r.graph, reverse(s, r.applied));
    CHECK(back.graph == g);
  }
}

TEST_CASE("Woodbury identity and support") {
  const auto g = cubic(500, 7);
  const auto params = Parameters::for_graph(500, 3, 1, 0.5, 2);
  const SpectralPoint<> p(0.0, 2.0);

  auto s0 = find_proposal(g, params, 1, 1);
  std::fill(s0.admissible.begin(), s0.admissible.end(), 0);
  const auto zero = woodbury_f(g, s0, p);
  REQUIRE(zero.op);
  CHECK(zero.op->F.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.op->F_woodbury.cwiseAbs().maxCoeff() == 0.0);

  const auto s1 = find_proposal(g, params, 1, 2);
  const auto one = woodbury_f(g, s1, p);
  REQUIRE(one.op);
  CHECK(one.op->identity_residual < 1e-9);
  CHECK(one.op->support_leak == 0.0);
  CHECK(one.op->support.size() == 4);

  const auto s3 = find_proposal(g, params, 3, 3);
  const auto three = woodbury_f(g, s3, SpectralPoint<>(1.5, 0.1));
  REQUIRE(three.op);
  CHECK(three.op->identity_residual < 1e-9);
}

TEST_CASE("resolvent update expansion") {
  const auto g = cubic(500, 8);
  const auto params = Parameters::for_graph(500, 3, 1, 0.5, 2);
  const SpectralPoint<> p(0.0, 2.0);
  const auto s = find_proposal(g, params, 1, 4);
  const auto wb = woodbury_f(g, s, p);
  REQUIRE(wb.op);
  const auto switched = apply(g, s);
  const ResolventCache cg(NormalizedAdjacency(g), p), ct(NormalizedAdjacency(switched.graph), p);
  std::vector<std::pair<Vertex, Vertex>> entries{{0, 0}, {3, 9}, {s.center, s.center}};
  for (Vertex v : wb.op->support) entries.emplace_back(v, (v + 1) % 500);
  const auto rep = resolvent_update_expansion(cg, ct, *wb.op, 10, entries);
  CHECK(rep.max_error[8] < 1e-8);
  CHECK(rep.max_error[10] <= rep.max_error[0]);
  CHECK_FALSE(rep.diverging);
  CHECK(rep.increment[1] / rep.increment[0] < 1.0);
  CHECK(rep.max_error[0] <= rep.increment[1] / (1.0 - rep.increment[1] / rep.increment[0]) * 1.01);

  // |m~ - m| is of the order (d-1)^ell Im m / (N eta).
  const Complex dm = ct.m_n() - cg.m_n();
  CHECK(std::abs(dm) <= 10.0 * 2.0 * cg.m_n().imag() / (500.0 * p.eta()));

  auto none = s;
  std::fill(none.admissible.begin(), none.admissible.end(), 0);
  const auto wz = woodbury_f(g, none, p);
  REQUIRE(wz.op);
  const ResolventCache same(NormalizedAdjacency(apply(g, none).graph), p);
  const auto z = resolvent_update_expansion(cg, same, *wz.op, 3, entries);
  CHECK(z.exact_norm == 0.0);
  CHECK(z.max_error[3] == 0.0);
}

TEST_CASE("statistics") {
  const auto g = petersen();
  CHECK(triangle_count(g) == 0.0);
  const std::vector<std::pair<Vertex, Vertex>> k4e{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  CHECK(triangle_count(RegularGraph::from_edges(4, 3, k4e)) == 4.0);
  // Petersen spectrum of A is {3, 1^5, -2^4}.
  CHECK(second_eigenvalue(g) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(statistic_by_name("degree0")(g) == 3.0);
  CHECK(statistic_by_name("edge01")(g) == 1.0);
  CHECK_THROWS_AS(statistic_by_name("girth"), std::invalid_argument);
}

TEST_CASE("exchangeability of a constant statistic and worker independence") {
  const SamplerConfig cfg{100, 3, Model::UniformPairing, 9};
  const auto rep = exchangeability_test(cfg, 1, statistic_by_name("degree0"), 20);
  CHECK(rep.samples == 20);
  CHECK(rep.ks_statistic == 0.0);
  CHECK(rep.degree_violations == 0);
  CHECK(rep.f_original == rep.f_switched);

  setenv("REGEDGE_THREADS", "1", 1);
  const auto a = exchangeability_test(cfg, 1, statistic_by_name("triangles"), 30);
  setenv("REGEDGE_THREADS", "3", 1);
  const auto b = exchangeability_test(cfg, 1, statistic_by_name("triangles"), 30);
  unsetenv("REGEDGE_THREADS");
  CHECK(a.f_original == b.f_original);
  CHECK(a.f_switched == b.f_switched);
  CHECK(a.ks_p_value == b.ks_p_value);
}
