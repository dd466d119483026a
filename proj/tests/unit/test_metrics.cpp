#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chiral/errors.hpp"
#include "chiral/metrics.hpp"

using namespace chiral;

namespace {

double lambda(double x) { return std::exp(-std::exp(-x)); }

}  // namespace

TEST_CASE("Gumbel against itself") {
  const auto v = shifted_gumbel_view(0.0);
  const auto w = w1_distance(v);
  CHECK(std::abs(w.value) < 1e-12);
  CHECK(w.error <= 1e-12);
  CHECK(ks_distance(v).value == 0.0);
}

TEST_CASE("W1 translation identity") {
  for (double c : {0.01, -0.01, 0.3, -0.3, 2.0, -2.0}) {
    const auto w = w1_distance(shifted_gumbel_view(c));
    INFO("c=" << c);
    CHECK(std::abs(w.value - std::abs(c)) <= 1e-6);
    CHECK(w.error <= 1e-9 * w.value + 1e-12);
  }
}

TEST_CASE("KS of a shifted Gumbel against a dense grid") {
  const double c = 0.1;
  double ref = 0;
  for (int i = 0; i <= 1000000; ++i) {
    const double x = -10.0 + 30.0 * i / 1000000;
    ref = std::max(ref, std::abs(lambda(x - c) - lambda(x)));
  }
  const auto k = ks_distance(shifted_gumbel_view(c));
  // The grid oracle sits below the sup by at most ~h^2 |g''|.
  CHECK(k.value >= ref - 1e-12);
  CHECK(k.value - ref < 1e-9);
  CHECK(k.grid_value <= k.value);
  CHECK(k.value <= k.upper);
}

TEST_CASE("W1 budget failure is reported") {
  auto v = shifted_gumbel_view(0.3);
  v.right_mass = [](double) { return 1e-3; };
  CHECK_THROWS_AS(w1_distance(v), CertificationError);
}

TEST_CASE("W1 of F_n against a coarse trapezoid") {
  const auto c = make_curve({100000000, 0}, Engine::gamma_approx);
  const auto w = w1_distance(c);
  const double a = -c.constants.ell1 - 6.0;
  const double b = c.constants.ell2 + 25.0;
  const int m = 100000;
  const double h = (b - a) / m;
  double s = 0;
  for (int i = 0; i <= m; ++i) {
    const double x = a + h * i;
    const double f = std::abs(cdf(c, x).cdf - lambda(x));
    s += (i == 0 || i == m) ? 0.5 * f : f;
  }
  s *= h;
  MESSAGE("W1 n=1e8: " << w.value << " trapezoid " << s);
  CHECK(std::abs(w.value / s - 1.0) < 1e-6);
}

TEST_CASE("KS search on F_n") {
  const auto c = make_curve({1000000, 0}, Engine::gamma_approx);
  const auto& k = c.constants;
  MetricsOptions o;
  const auto r = ks_distance(c, o);
  const double h = (k.ell2 + 10 - (-k.ell1 - 8)) / (o.ks_grid - 1);
  CHECK(r.grid_value <= r.value);
  CHECK(r.value <= r.upper);
  CHECK(r.value <= r.grid_value + 0.5 * h);
  CHECK(r.upper - r.value < 1e-6);
  CHECK(r.x_at_sup > -k.ell1 - 2);
  CHECK(r.x_at_sup < k.ell2 + 2);
  o.ks_grid = 8192;
  const auto r2 = ks_distance(c, o);
  CHECK(std::abs(r2.value - r.value) <= 1e-10);
  o.workers = 3;
  const auto r3 = ks_distance(c, o);
  CHECK(r3.value == r2.value);
  CHECK(r3.x_at_sup == r2.x_at_sup);
}

TEST_CASE("x_at_sup sits next to (-2/ell2, 0) for large n") {
  const auto c = make_curve({1000000000000LL, 0}, Engine::gamma_approx);
  const auto r = ks_distance(c);
  const double l2 = c.constants.ell2;
  MESSAGE("x_at_sup " << r.x_at_sup << ", interval (" << -2 / l2 << ", 0)");
  CHECK(r.x_at_sup > -2.0 / l2 - 0.25);
  CHECK(r.x_at_sup < 0.25);
}

TEST_CASE("g and its minimizer") {
  for (double n : {1e4, 1e8, 1e12}) {
    const auto c = scaling_constants({static_cast<std::int64_t>(n), 0});
    const double xs = x_star(c);
    const double l2 = c.ell2;
    CHECK(xs > -2.0 / l2);
    CHECK(xs < 0.0);
    CHECK(std::abs(1.0 - std::exp(-xs) + 2.0 / (l2 - xs)) < 1e-12);
    const double g0 = g_profile(c, xs);
    CHECK(g0 < g_profile(c, 0.0));
    CHECK(g_profile(c, 0.0) == doctest::Approx(1.0 - 2.0 * std::log(l2)).epsilon(1e-14));
    CHECK(g0 > 1.0 - 2.0 / l2 - 2.0 * std::log(l2 + 2.0 / l2));
    for (double x = -1.0; x < l2 - 0.01; x += 0.01) CHECK(g_profile(c, x) >= g0);
  }
}

TEST_CASE("predicted sup profile") {
  const auto c = scaling_constants({1000000000000LL, 0});
  CHECK(predicted_sup_profile(c, 0.0) ==
        doctest::Approx(std::exp(-1.0) * c.ell2 * c.ell2 / (2 * c.log_s)).epsilon(1e-14));
  CHECK_THROWS_AS(predicted_sup_profile(c, c.ell2), DomainError);
  double mx = 0;
  for (double x = -1.0; x < c.ell2; x += 1e-4) mx = std::max(mx, predicted_sup_profile(c, x));
  CHECK(predicted_sup_max(c) >= mx);
  CHECK(predicted_sup_max(c) - mx < 1e-8);
  CHECK(predicted_sup_max(c) >= predicted_sup_profile(c, 0.0));
  // l2^2 / (2 e log s_n) = 0.121 at n = 1e12, up to the o(1) factor.
  const double lead = c.ell2 * c.ell2 / (2 * std::numbers::e * c.log_s);
  CHECK(lead == doctest::Approx(0.121).epsilon(0.01));
  CHECK(std::abs(predicted_sup_max(c) / lead - 1.0) < 0.15);
}

TEST_CASE("scaled report consistency") {
  const auto c = make_curve({1000000, 0}, Engine::gamma_approx);
  const auto r = scaled_report(c);
  const double lls = std::log(c.constants.log_s);
  const double sc = c.constants.log_s / (lls * lls);
  CHECK(r.scaled_w1 == doctest::Approx(r.w1 * sc).epsilon(1e-15));
  CHECK(r.scaled_ks == doctest::Approx(r.ks * sc).epsilon(1e-15));
  CHECK(r.predicted_w1 == doctest::Approx(lls * lls / (2 * c.constants.log_s)).epsilon(1e-15));
  CHECK(r.predicted_ks == doctest::Approx(r.predicted_w1 / std::numbers::e).epsilon(1e-15));
  CHECK(r.ratio_w1 == doctest::Approx(2 * r.scaled_w1).epsilon(1e-15));
  CHECK(r.ratio_ks == doctest::Approx(2 * std::numbers::e * r.scaled_ks).epsilon(1e-15));
  CHECK(r.w1 >= 0);
  CHECK(r.ks <= 1);
  CHECK(r.ks_upper >= r.ks);
}
