#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "regedge/graph.hpp"
#include "regedge/samplers.hpp"

using namespace regedge;

namespace {

RegularGraph k4() {
  const std::vector<std::pair<Vertex, Vertex>> e{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  return RegularGraph::from_edges(4, 3, e);
}

RegularGraph random_cubic(int n, std::uint64_t seed) {
  return sample_indexed(SamplerConfig{n, 3, Model::UniformPairing, seed}, 0);
}

}  // namespace

TEST_CASE("construction validates regularity and simplicity") {
  CHECK_NOTHROW(k4());
  const std::vector<std::pair<Vertex, Vertex>> loop{{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 1}, {2, 0}};
  CHECK_THROWS_AS(RegularGraph::from_edges(4, 3, loop), std::invalid_argument);
  const std::vector<std::pair<Vertex, Vertex>> doubled{{0, 1}, {0, 1}, {0, 2}, {1, 3}, {2, 3}, {2, 3}};
  CHECK_THROWS_AS(RegularGraph::from_edges(4, 3, doubled), std::invalid_argument);
  const std::vector<std::pair<Vertex, Vertex>> short_edges{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
  CHECK_THROWS_AS(RegularGraph::from_edges(4, 3, short_edges), std::invalid_argument);
}

TEST_CASE("directed edges") {
  const auto g = k4();
  CHECK(directed_edges(g).size() == 12);
  const auto h = random_cubic(200, 4);
  const auto de = directed_edges(h);
  CHECK(de.size() == 600);
  std::multiset<std::pair<Vertex, Vertex>> und;
  for (const auto& e : de) und.emplace(std::min(e.from, e.to), std::max(e.from, e.to));
  for (const auto& e : h.edges()) CHECK(und.count(e) == 2);
}

TEST_CASE("balls") {
  const auto g = k4();
  const Vertex c[] = {2};
  const auto b0 = ball(g, c, 0);
  CHECK(b0.vertices == std::vector<Vertex>{2});
  CHECK(b0.edges.empty());
  CHECK(ball(g, c, 1).vertices.size() == 4);
  CHECK(excess(ball(g, c, 1)) == 3);

  const auto h = random_cubic(300, 9);
  for (Vertex v : {0, 17, 123}) {
    const Vertex cv[] = {v};
    for (int r = 0; r < 4; ++r) {
      const auto small = ball(h, cv, r), big = ball(h, cv, r + 1);
      for (Vertex w : small.vertices) CHECK(big.contains(w));
      for (std::size_t i = 0; i < small.vertices.size(); ++i) {
        CHECK(distance(h, v, small.vertices[i], r) == small.distance[i]);
      }
    }
  }
}

TEST_CASE("excess of trees and cycles") {
  Ball path;
  path.vertices = {0, 1, 2, 3};
  path.edges = {{0, 1}, {1, 2}, {2, 3}};
  CHECK(excess(path) == 0);
  Ball cycle;
  cycle.vertices = {0, 1, 2, 3, 4};
  cycle.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  CHECK(excess(cycle) == 1);
}

TEST_CASE("distance is a metric") {
  const auto h = random_cubic(100, 3);
  Rng rng = make_stream(5, 0);
  for (int t = 0; t < 30; ++t) {
    const auto u = static_cast<Vertex>(uniform_index(rng, 100));
    const auto v = static_cast<Vertex>(uniform_index(rng, 100));
    const auto w = static_cast<Vertex>(uniform_index(rng, 100));
    const int uv = distance(h, u, v, 100), vu = distance(h, v, u, 100);
    CHECK(uv == vu);
    CHECK(uv <= distance(h, u, w, 100) + distance(h, w, v, 100));
  }
  CHECK(distance(h, 0, 0, 0) == 0);
}

TEST_CASE("boundary edges") {
  const auto h = random_cubic(2000, 11);
  int tree_like = 0;
  for (Vertex o = 0; o < 50; ++o) {
    const Vertex c[] = {o};
    const auto t = ball(h, c, 2);
    const auto be = boundary_edges(h, t);
    CHECK(be.size() <= 12);
    for (const auto& e : be) {
      CHECK(t.contains(e.from));
      CHECK_FALSE(t.contains(e.to));
    }
    const bool tree = excess(t) == 0;
    CHECK((be.size() == 12) == tree);
    tree_like += tree;
  }
  CHECK(tree_like > 40);
}

TEST_CASE("parameters") {
  const auto p = Parameters::for_graph(2000, 3);
  CHECK(p.R == 2);
  CHECK(p.iso_radius == 2);
  CHECK(p.frak_c == 0.5);
  CHECK(p.ell == 2);
  const auto q = Parameters::for_graph(2000, 3, 1, 0.5, 4, 1);
  CHECK(q.R == 4);
  CHECK(q.iso_radius == 1);
  CHECK_THROWS_AS(Parameters::for_graph(2000, 3, 5, 0.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(Parameters::for_graph(2000, 3, 2, 1.5), std::invalid_argument);
}

TEST_CASE("omega bar event") {
  Parameters p;
  p.R = 1;
  p.ell = 1;
  CHECK_FALSE(omega_bar_check(k4(), p).pass);
  CHECK(omega_bar_check(k4(), p).max_excess == 3);
  int pass = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto g = random_cubic(5000, 100 + s);
    pass += omega_bar_check(g, Parameters::for_graph(5000, 3, 1)).pass;
  }
  CHECK(pass >= 45);
}

TEST_CASE("edge list round trip") {
  const auto g = random_cubic(50, 2);
  const std::string text = to_edge_list(g);
  std::istringstream is(text);
  const auto back = read_edge_list(is);
  CHECK(back == g);
  CHECK(to_edge_list(back) == text);
  std::istringstream bad("4 3\n0 1\n");
  CHECK_THROWS(read_edge_list(bad));
}
