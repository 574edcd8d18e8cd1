#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "regedge/analytic.hpp"
#include "regedge/resolvent.hpp"
#include "regedge/samplers.hpp"

using namespace regedge;

namespace {

RegularGraph k4() {
  const std::vector<std::pair<Vertex, Vertex>> e{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  return RegularGraph::from_edges(4, 3, e);
}

RegularGraph cubic(int n, std::uint64_t seed) {
  return sample_indexed(SamplerConfig{n, 3, Model::UniformPairing, seed}, 0);
}

}  // namespace

TEST_CASE("K4 spectrum and resolvent") {
  const NormalizedAdjacency h(k4());
  const auto ev = eigenvalues(h);
  CHECK(ev(0) == doctest::Approx(3.0 / std::sqrt(2.0)));
  for (int i = 1; i < 4; ++i) CHECK(ev(i) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  const SpectralPoint<> p(0.0, 2.0);
  const ResolventCache cache(h, p);
  CHECK((cache.matrix() - oracle::k4_resolvent(p.z())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectrum of a sampled graph") {
  const auto g = cubic(200, 1);
  const NormalizedAdjacency h(g);
  const auto ev = eigenvalues(h);
  CHECK(std::abs(ev(0) - h.trivial_eigenvalue()) < 1e-8);
  CHECK(std::is_sorted(ev.data(), ev.data() + ev.size(), std::greater<>()));
  CHECK(ev.cwiseAbs().maxCoeff() <= h.trivial_eigenvalue() + 1e-10);
  const Eigen::MatrixXd a = h.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  for (int k : {0, 10, 50, 120, 199}) {
    const Eigen::VectorXd v = es.eigenvectors().col(k);
    CHECK((a * v - es.eigenvalues()(k) * v).norm() <= 1e-8 * a.norm());
  }
  CHECK_THROWS_AS(eigenvalues(h, 100), SizeLimitError);
}

TEST_CASE("resolvent identities") {
  const auto g = cubic(300, 2);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(1.7, 0.05);
  const ResolventCache cache(h, p, eigenvalues(h));
  std::vector<Vertex> rows{0, 13, 47, 99, 150, 201, 250, 299, 7, 88};
  CHECK(ward_check(cache, rows).max_residual < 1e-9);
  CHECK(rowsum_check(cache, g, rows).max_residual < 1e-9);
  CHECK(std::abs(cache.m_n() - cache.m_n_spectral()) < 1e-8);

  Eigen::MatrixXcd hz = h.dense().cast<Complex>();
  hz.diagonal().array() -= p.z();
  for (Vertex j : {3, 77}) {
    CHECK((hz * cache.column(j) - Eigen::VectorXcd::Unit(300, j)).norm() < 1e-9);
  }
  CHECK(cache.diagonal().size() == 300);
  CHECK_THROWS(ResolventCache(h, SpectralPoint<>(0.0, 1e-13)));
}

TEST_CASE("LU-backed cache agrees with the dense inverse") {
  const auto g = cubic(2100, 3);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(0.5, 0.1);
  const ResolventCache cache(h, p);
  CHECK_FALSE(cache.dense());
  const auto col = cache.column(5);
  CHECK(std::abs(cache.entry(17, 5) - col(17)) < 1e-12);
  const std::vector<Vertex> rows{1, 500, 2099};
  CHECK(ward_check(cache, rows).max_residual < 1e-9);
  CHECK(rowsum_check(cache, g, rows).max_residual < 1e-9);
}

TEST_CASE("Schur minors agree with direct minors") {
  const auto g = cubic(120, 4);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(-0.4, 0.3);
  const ResolventCache cache(h, p);
  const auto dense = oracle::normalized_adjacency(g);

  const Vertex k = 9;
  const Vertex rk[] = {k};
  const auto single = green_minor(cache, rk);
  for (Vertex i : {0, 5, 33}) {
    for (Vertex j : {1, 60, 119}) {
      const Complex shortcut = cache.entry(i, j) - cache.entry(i, k) * cache.entry(k, j) / cache.entry(k, k);
      CHECK(std::abs(single.entry(i, j) - shortcut) < 1e-12);
    }
  }

  const std::vector<int> removed{2, 9, 40, 41, 77};
  const std::vector<Vertex> rv(removed.begin(), removed.end());
  const auto block = green_minor(cache, rv);
  const auto direct = direct_minor(h, p, rv);
  std::vector<int> kept;
  const auto ref = oracle::minor_resolvent(dense, removed, p.z(), kept);
  double worst = 0.0;
  for (std::size_t a = 0; a < kept.size(); a += 7) {
    for (std::size_t b = 0; b < kept.size(); b += 5) {
      worst = std::max(worst, std::abs(block.entry(kept[a], kept[b]) - ref(a, b)));
      worst = std::max(worst, std::abs(direct.entry(kept[a], kept[b]) - ref(a, b)));
    }
  }
  CHECK(worst < 1e-8);

  const auto none = green_minor(cache, std::span<const Vertex>{});
  CHECK(none.entry(3, 8) == cache.entry(3, 8));
}

TEST_CASE("disconnecting removal") {
  // Two prisms, each missing one rung, joined only through the cut vertices 3 and 7.
  const std::vector<std::pair<Vertex, Vertex>> e{
      {0, 1},  {0, 2},   {1, 2},   {4, 5},   {5, 6},  {4, 6},  {0, 4},  {1, 5},   {8, 9},   {8, 10},
      {9, 10}, {11, 12}, {12, 13}, {11, 13}, {8, 11}, {9, 12}, {3, 2},  {3, 10},  {3, 7},   {7, 6},
      {7, 13}};
  const auto g = RegularGraph::from_edges(14, 3, e);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(0.2, 0.4);
  const ResolventCache cache(h, p);
  const Vertex cut[] = {3, 7};
  const auto direct = direct_minor(h, p, cut);
  const auto schur = green_minor(cache, cut);
  for (Vertex x : {0, 4, 6}) {
    for (Vertex y : {8, 10, 13}) {
      CHECK(std::abs(direct.entry(x, y)) < 1e-12);
      CHECK(std::abs(schur.entry(x, y) - direct.entry(x, y)) < 1e-8);
    }
  }
}

TEST_CASE("Q by the Schur shortcut equals Q by direct minors") {
  const auto g = cubic(20, 5);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(1.0, 0.2);
  const ResolventCache cache(h, p);
  CHECK(std::abs(q_of(cache, g) - q_of_direct(h, p)) < 1e-9);

  // Relabelling by a rotation leaves Q unchanged.
  std::vector<std::pair<Vertex, Vertex>> e;
  for (const auto& [u, v] : g.edges()) e.emplace_back((u + 7) % 20, (v + 7) % 20);
  const auto g2 = RegularGraph::from_edges(20, 3, e);
  const ResolventCache c2(NormalizedAdjacency(g2), p);
  CHECK(std::abs(q_of(c2, g2) - q_of(cache, g)) < 1e-12);
}

TEST_CASE("Q is close to the semicircle transform at N = 2000") {
  const auto g = cubic(2000, 6);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(2.0, std::pow(2000.0, -2.0 / 3.0));
  const ResolventCache cache(h, p);
  CHECK(std::abs(q_of(cache, g) - stieltjes_semicircle(p)) <= 0.2);
}

TEST_CASE("z-derivative of the empirical transform") {
  Eigen::VectorXd toy(1);
  toy << 0.0;
  // d/dz (0 - z)^{-1} = (0 - z)^{-2} = -1 at z = i.
  CHECK(std::abs(dz_m_n(toy, Complex(0.0, 1.0)) - Complex(-1.0)) < 1e-15);

  const auto g = cubic(300, 7);
  const NormalizedAdjacency h(g);
  const auto ev = eigenvalues(h);
  const SpectralPoint<> p(1.2, 0.1);
  const ResolventCache cache(h, p, ev);
  const Complex dz = dz_m_n(ev, p.z());
  CHECK(std::abs(dz - cache.trace_square_over_n()) < 1e-8);
  const Eigen::MatrixXcd gm = cache.matrix();
  CHECK(std::abs(dz - (gm * gm).trace() / 300.0) < 1e-8);

  const double step = 1e-5;
  const Complex up = ResolventCache(h, SpectralPoint<>(1.2 + step, 0.1)).m_n();
  const Complex dn = ResolventCache(h, SpectralPoint<>(1.2 - step, 0.1)).m_n();
  const Complex fd = (up - dn) / (2.0 * step);
  CHECK(std::abs(fd - dz) / std::abs(dz) < 1e-5);
}

TEST_CASE("local law") {
  const auto g = cubic(1000, 8);
  const NormalizedAdjacency h(g);
  const SpectralPoint<> p(2.0, 0.05);
  const ResolventCache cache(h, p);

  // Far-apart pairs see disconnected ball blocks.
  Vertex far = -1;
  for (Vertex v = 1; v < 1000 && far < 0; ++v) {
    if (distance(g, 0, v, 7) < 0) far = v;
  }
  REQUIRE(far > 0);
  CHECK(local_law_error_pair(cache, g, 3, 0, far) == doctest::Approx(std::abs(cache.entry(0, far))));

  // On a tree-like ball the diagonal prediction is m_d.
  for (Vertex v = 0; v < 100; ++v) {
    const Vertex c[] = {v};
    if (excess(ball(g, c, 4)) == 0) {
      CHECK(local_law_error_pair(cache, g, 3, v, v) ==
            doctest::Approx(std::abs(cache.entry(v, v) - stieltjes_kesten_mckay(p, 3))).epsilon(1e-9));
      break;
    }
  }

  Rng rng = make_stream(1, 0);
  const auto rep = local_law_error(cache, g, 3, 40, rng);
  CHECK(rep.errors.size() == 40);
  CHECK(rep.median_err <= rep.max_err);
  CHECK(rep.median_err < 0.3);
}
