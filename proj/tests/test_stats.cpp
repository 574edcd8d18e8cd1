#include <doctest.h>

#include <cmath>
#include <vector>

#include "regedge/parallel.hpp"
#include "regedge/rng.hpp"
#include "regedge/stats.hpp"

using namespace regedge;

TEST_CASE("descriptive statistics") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(stats::pairwise_sum(x) == 10.0);
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::median(x) == 2.5);
  CHECK(stats::quantile(x, 0.0) == 1.0);
  CHECK(stats::quantile(x, 1.0) == 4.0);
  CHECK(stats::quantile(x, 1.0 / 3.0) == doctest::Approx(2.0));
  const std::vector<double> y{8.0, 2.0, 6.0, 4.0};
  CHECK(stats::correlation(x, y) == doctest::Approx(1.0));
  CHECK(stats::ols_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(stats::kolmogorov_sf(0.0) == 1.0);
  CHECK(stats::kolmogorov_sf(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(stats::kolmogorov_sf(1.63) == doctest::Approx(0.0098).epsilon(0.02));
}

TEST_CASE("two-sample KS") {
  Rng rng = make_stream(1, 0);
  std::vector<double> a(400), b(400), c(400);
  for (auto& v : a) v = uniform_unit(rng);
  for (auto& v : b) v = uniform_unit(rng);
  for (auto& v : c) v = uniform_unit(rng) + 0.3;
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
  CHECK(stats::ks_two_sample(a, c).p_value < 1e-6);
  const auto self = stats::ks_two_sample(a, a);
  CHECK(self.statistic == 0.0);
  CHECK(self.p_value == 1.0);
  const auto one = stats::ks_one_sample(a, [](double t) { return std::clamp(t, 0.0, 1.0); });
  CHECK(one.statistic < 0.07);
}

TEST_CASE("chi-square") {
  CHECK(stats::gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(stats::chi_square_sf(3.84146, 1.0) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(stats::chi_square_sf(90.531, 69.0) == doctest::Approx(0.0425).epsilon(0.02));
  const std::vector<std::int64_t> flat(10, 100);
  const auto r = stats::chi_square_uniform(flat);
  CHECK(r.statistic == 0.0);
  CHECK(r.dof == 9);
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("sign test") {
  CHECK(stats::sign_test(5, 5) == doctest::Approx(1.0));
  CHECK(stats::sign_test(10, 0) == doctest::Approx(2.0 / 1024.0));
  CHECK(stats::sign_test(0, 0) == 1.0);
}

TEST_CASE("bootstrap interval brackets the median") {
  std::vector<double> x;
  for (int i = 0; i < 101; ++i) x.push_back(i);
  Rng rng = make_stream(2, 0);
  const auto ci = stats::bootstrap_ci(
      x, [](std::span<const double> v) { return stats::median(v); }, 1000, 0.95, rng);
  CHECK(ci.lo <= 50.0);
  CHECK(ci.hi >= 50.0);
  CHECK(ci.hi - ci.lo < 40.0);
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(100, 0);
  parallel_for(100, [&](int i) { out[i] = i * i; }, 4);
  for (int i = 0; i < 100; ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(parallel_for(
                      10,
                      [](int i) {
                        if (i == 7) throw std::runtime_error("boom");
                      },
                      3),
                  std::runtime_error);
}

TEST_CASE("streams are independent of call order") {
  Rng a = make_stream(7, 3, 1);
  Rng b = make_stream(7, 3, 1);
  CHECK(a() == b());
  CHECK_FALSE(make_stream(7, 3, 1)() == make_stream(7, 4, 1)());
  CHECK_FALSE(make_stream(7, 3, 1)() == make_stream(7, 3, 2)());
  for (int i = 0; i < 1000; ++i) CHECK(uniform_index(a, 7) < 7);
}
