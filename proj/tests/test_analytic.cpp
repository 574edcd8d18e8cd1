#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "regedge/analytic.hpp"
#include "regedge/weighted_tree.hpp"

using namespace regedge;
using C = std::complex<double>;

namespace {

std::vector<SpectralPoint<>> grid() {
  std::vector<SpectralPoint<>> out;
  for (double re : {-3.0, -2.0, -1.2, 0.0, 0.7, 1.9, 2.0, 2.3, 4.0}) {
    for (double im : {0.05, 0.2, 1.0, 3.0}) out.emplace_back(re, im);
  }
  return out;
}

}  // namespace

TEST_CASE("spectral point rejects the closed lower half-plane") {
  CHECK_THROWS_AS(SpectralPoint<>(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(SpectralPoint<>(1.0, -0.5), std::domain_error);
  const SpectralPoint<> p(1.5, 0.25);
  CHECK(p.eta() == 0.25);
  CHECK(p.kappa() == doctest::Approx(0.5));
}

TEST_CASE("semicircle transform matches the quadratic oracle") {
  CHECK(std::abs(stieltjes_semicircle(SpectralPoint<>(0.0, 2.0)) - C(0.0, std::sqrt(2.0) - 1.0)) < 1e-14);
  CHECK(std::abs(stieltjes_semicircle(SpectralPoint<>(0.0, 1.0)) - C(0.0, (std::sqrt(5.0) - 1.0) / 2.0)) < 1e-14);
  CHECK(std::abs(stieltjes_semicircle(SpectralPoint<>(0.0, 1e-9)) - C(0.0, 1.0)) < 1e-8);
  for (const auto& p : grid()) {
    const C m = stieltjes_semicircle(p);
    CHECK(m.imag() > 0.0);
    CHECK(std::abs(m * m + p.z() * m + 1.0) < 1e-12);
    CHECK(std::abs(m - oracle::semicircle(p.z())) < 1e-12);
  }
}

TEST_CASE("Kesten-McKay transform agrees with the radical form") {
  CHECK(std::abs(stieltjes_kesten_mckay(SpectralPoint<>(0.0, 1e-10), 3) - C(0.0, 2.0 / 3.0)) < 1e-8);
  for (int d : {3, 4, 5, 8}) {
    for (const auto& p : grid()) {
      const C md = stieltjes_kesten_mckay(p, d);
      CHECK(md.imag() > 0.0);
      CHECK(std::abs(md - oracle::kesten_mckay_radical(p.z(), d)) < 1e-12);
    }
  }
  const SpectralPoint<> p(0.5, 0.5);
  const C msc = stieltjes_semicircle(p);
  CHECK(std::abs(stieltjes_kesten_mckay(p, 1000) - msc) < 5e-3);
  CHECK_THROWS_AS(stieltjes_kesten_mckay(p, 2), std::invalid_argument);
}

TEST_CASE("branch is correct on a 100-point grid") {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const SpectralPoint<> p(-5.0 + i * 1.1, std::pow(10.0, -3.0 + 0.4 * j));
      CHECK(stieltjes_semicircle(p).imag() > 0.0);
      CHECK(stieltjes_kesten_mckay(p, 3).imag() > 0.0);
    }
  }
}

TEST_CASE("Kesten-McKay density") {
  CHECK(km_density(2.0, 3) == 0.0);
  CHECK(km_density(-2.0, 3) == 0.0);
  CHECK(km_density(0.0, 3) == doctest::Approx(2.0 / (3.0 * std::numbers::pi)).epsilon(1e-12));
  for (int d : {3, 4, 6}) {
    const double mass = oracle::simpson([d](double x) { return km_density(x, d); }, -2.0, 2.0, 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    for (double x : {-1.5, 0.0, 1.5}) {
      const double stieltjes = stieltjes_kesten_mckay(SpectralPoint<>(x, 1e-6), d).imag() / std::numbers::pi;
      CHECK(std::abs(stieltjes - km_density(x, d)) < 1e-3);
    }
  }
}

TEST_CASE("Kesten-McKay CDF matches adaptive quadrature") {
  for (int d : {3, 5}) {
    CHECK(km_cdf(-3.0, d) == 0.0);
    CHECK(km_cdf(3.0, d) == 1.0);
    CHECK(km_cdf(0.0, d) == doctest::Approx(0.5).epsilon(1e-12));
    for (double x : {-1.9, -1.0, -0.3, 0.4, 1.2, 1.99}) {
      const double ref = oracle::simpson([d](double t) { return km_density(t, d); }, -2.0, x, 1e-13);
      CHECK(std::abs(km_cdf(x, d) - ref) < 1e-8);
    }
  }
}

TEST_CASE("edge constant") {
  CHECK(edge_constant(3) == 6.0);
  CHECK(edge_constant(4) == 3.0);
  const double s = 1e-8;
  CHECK(km_density(2.0 - s, 3) * std::numbers::pi / std::sqrt(s) == doctest::Approx(edge_constant(3)).epsilon(1e-3));
  CHECK_THROWS_AS(edge_constant(2), std::invalid_argument);
}

TEST_CASE("tree Green's functions agree with a weighted finite tree") {
  const SpectralPoint<> p(0.0, 2.0);
  const C msc = stieltjes_semicircle(p);
  CHECK(std::abs(tree_green_regular(0, p, 3) - stieltjes_kesten_mckay(p, 3)) < 1e-15);
  CHECK(std::abs(tree_green_regular(1, p, 3) - stieltjes_kesten_mckay(p, 3) * (-msc / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(tree_green_ary(0, 0, p, 3) - msc) < 1e-12);
  CHECK_THROWS_AS(tree_green_regular(-1, p, 3), std::invalid_argument);

  // With the fixed-point weight the truncated tree reproduces the infinite one exactly.
  for (int d : {3, 4}) {
    const auto t = truncated_regular_tree(d, 4);
    const WeightedTreeOperator<> op(t.graph, d, p, stieltjes_semicircle(p));
    for (int v = 0; v < t.graph.size(); v += 3) {
      CHECK(std::abs(op.entry(0, v) - tree_green_regular(t.depth[v], p, d)) < 1e-12);
    }
    const auto a = truncated_ary_tree(d, 4);
    const WeightedTreeOperator<> opa(a.graph, d, p, stieltjes_semicircle(p));
    for (int v = 1; v < a.graph.size(); v += 5) {
      // (0, v) has its common ancestor at the root, (v, v) at v itself.
      CHECK(std::abs(opa.entry(0, v) - tree_green_ary(a.depth[v], 0, p, d)) < 1e-12);
      CHECK(std::abs(opa.entry(v, v) - tree_green_ary(0, a.depth[v], p, d)) < 1e-12);
    }
  }
}

TEST_CASE("weighted tree operator") {
  const SpectralPoint<> p(0.3, 0.7);
  const C delta(0.2, 0.1);
  LocalGraph single;
  single.add_vertex(7);
  const WeightedTreeOperator<> one(single, 3, p, delta);
  CHECK(std::abs(one.entry(7, 7) - 1.0 / (-p.z() - 1.5 * delta)) < 1e-15);

  const auto t = truncated_ary_tree(3, 5);
  for (const auto& pt : {SpectralPoint<>(0.0, 0.05), SpectralPoint<>(1.9, 0.05), SpectralPoint<>(-1.0, 1.0)}) {
    const WeightedTreeOperator<> op(t.graph, 3, pt, stieltjes_semicircle(pt));
    CHECK(std::abs(op.entry(0, 0) - stieltjes_semicircle(pt)) < 1e-10);
  }

  // Removing a child of the root disconnects its subtree from the root.
  const Vertex child = 1;
  const Vertex removed[] = {child};
  const WeightedTreeOperator<> cut(t.graph, 3, p, delta, removed);
  CHECK_FALSE(cut.contains(child));
  for (int v = 2; v < t.graph.size(); ++v) {
    int a = v;
    while (t.parent[a] > 0) a = t.parent[a];
    if (a == child) CHECK(cut.entry(0, v) == C(0.0));
  }

  LocalGraph star;
  for (int v = 1; v <= 4; ++v) star.add_edge_by_label(0, v);
  CHECK_THROWS_AS(WeightedTreeOperator<>(star, 3, p, delta), std::invalid_argument);
}

TEST_CASE("X and Y fixed points on the grid") {
  for (int d : {3, 4, 5}) {
    for (int ell = 1; ell <= 8; ++ell) {
      for (double re : {-2.5, -1.0, 0.0, 1.5, 2.0, 2.4}) {
        for (double im : {0.05, 0.3, 2.0}) {
          const SpectralPoint<> p(re, im);
          const C msc = stieltjes_semicircle(p);
          CHECK(std::abs(y_ell(msc, p, ell, d) - msc) < 1e-10);
          CHECK(std::abs(x_ell(msc, p, ell, d) - stieltjes_kesten_mckay(p, d)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("recursive and matrix forms of X and Y agree") {
  for (int d : {3, 4}) {
    for (int ell = 1; ell <= 6; ++ell) {
      const SpectralPoint<> p(1.7, 0.08);
      const C delta = stieltjes_semicircle(p) + C(0.01, -0.004);
      const C yr = y_ell_recursive(delta, p, ell, d);
      CHECK(std::abs(yr - y_ell_matrix(delta, p, ell, d)) < 1e-12);
      CHECK(std::abs(yr - oracle::y_dense(delta, p.z(), ell, d)) < 1e-12);
      CHECK(std::abs(x_ell_recursive(delta, p, ell, d) - x_ell_matrix(delta, p, ell, d)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(y_ell_recursive(C(0.5), SpectralPoint<>(0.0, 1.0), 0, 3), std::invalid_argument);
}

TEST_CASE("expansion coefficients match finite differences") {
  for (int ell : {1, 2, 4}) {
    for (const auto& p : {SpectralPoint<>(0.0, 1.0), SpectralPoint<>(1.8, 0.1), SpectralPoint<>(2.0, 0.05)}) {
      const C msc = stieltjes_semicircle(p);
      const auto k = y_expansion_coeffs(p, ell, 3);
      CHECK(std::abs(k.linear - std::pow(msc, 2 * ell + 2)) < 1e-14);
      const double h = 1e-4;
      const C yp = y_ell(msc + h, p, ell, 3), ym = y_ell(msc - h, p, ell, 3), y0 = y_ell(msc, p, ell, 3);
      const C first = (yp - ym) / (2.0 * h);
      const C second = (yp - 2.0 * y0 + ym) / (h * h);
      CHECK(std::abs(first - k.linear) / std::abs(k.linear) < 1e-4);
      CHECK(std::abs(second - 2.0 * k.quadratic) / std::abs(2.0 * k.quadratic) < 1e-3);
    }
  }
}

TEST_CASE("Y is Lipschitz near the fixed point") {
  const SpectralPoint<> p(1.9, 0.1);
  const C msc = stieltjes_semicircle(p);
  for (int ell : {1, 2, 3, 5}) {
    const double r = 0.01 / (ell * ell);
    double worst = 0.0;
    for (int k = 0; k < 12; ++k) {
      const C a = msc + std::polar(r, 0.5 * k), b = msc + std::polar(0.5 * r, 2.1 * k + 1.0);
      worst = std::max(worst, std::abs(y_ell(a, p, ell, 3) - y_ell(b, p, ell, 3)) / (ell * std::abs(a - b)));
    }
    CHECK(worst <= 10.0);
  }
}
