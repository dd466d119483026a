#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chiral/errors.hpp"
#include "chiral/scaling.hpp"

using namespace chiral;

namespace {

double a_direct(double y) {
  const long double l = std::log(static_cast<long double>(y));
  return static_cast<double>(std::sqrt(l) - std::log(std::sqrt(2.0L * std::numbers::pi_v<long double>) * l) / std::sqrt(l));
}

}  // namespace

TEST_CASE("s_n spot values") {
  CHECK(scaling_constants({100, 0}).s == 50.0);
  CHECK(scaling_constants({100, 50}).s == 60.0);
  CHECK(a_of(std::numbers::e) == doctest::Approx(0.0810614668).epsilon(1e-9));
  CHECK(a_of(std::numbers::e) == doctest::Approx(1.0 - std::log(std::sqrt(2 * std::numbers::pi))).epsilon(1e-14));
}

TEST_CASE("admissibility") {
  CHECK(min_admissible_n(0) == 6);
  CHECK_THROWS_AS(scaling_constants({5, 0}), AdmissibilityError);
  try {
    scaling_constants({5, 0});
  } catch (const AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("n >= 6") != std::string::npos);
  }
  CHECK_NOTHROW(scaling_constants({6, 0}));
  for (std::int64_t v : {1, 3, 10, 100}) {
    const auto m = min_admissible_n(v);
    CHECK(s_of({m, v}) > std::numbers::e);
    if (m > 1) CHECK(s_of({m - 1, v}) <= std::numbers::e);
  }
  CHECK_THROWS_AS(scaling_constants({0, 0}), DomainError);
}

TEST_CASE("u_n and x0_left") {
  const auto c = scaling_constants({50, 0});
  CHECK(u_n(c, 0.0) == doctest::Approx(100.0 + 10.0 * a_direct(25.0)).epsilon(1e-13));
  CHECK(std::abs(u_n(c, 0.0) - 106.3035) < 5e-4);
  CHECK((u_n(c, 1.0) - u_n(c, 0.0)) == doctest::Approx(10.0 * c.b).epsilon(1e-13));
  for (double n : {10.0, 1e3, 1e6, 1e9, 1e12}) {
    for (std::int64_t v : {0, 1, 7, 100}) {
      const auto cc = scaling_constants({static_cast<std::int64_t>(n), v});
      CHECK(std::abs(u_n(cc, -cc.x0_left)) <= 1e-9 * cc.center);
      CHECK(cc.x0_closed - cc.x0_left == doctest::Approx(cc.ell2).epsilon(1e-6));
      CHECK(x_of_u(cc, u_n(cc, 1.25)) == doctest::Approx(1.25).epsilon(1e-6));
    }
  }
}

TEST_CASE("w_tilde identities") {
  double prev_s = 0, prev_l = 0, prev_alpha = -INFINITY;
  for (double ln = 1.0; ln <= 12.0; ln += 0.25) {
    const auto n = static_cast<std::int64_t>(std::pow(10.0, ln));
    for (std::int64_t v : {0, 2, 50}) {
      const auto c = scaling_constants({n, v});
      CHECK(std::abs(w_tilde(c, 0, c.ell2) - std::sqrt(c.log_s)) <= 1e-12);
      CHECK(w_tilde(c, 0, 0.0) == c.a);
      CHECK(c.ell1 < c.ell2);
      CHECK(c.b == doctest::Approx(1 / std::sqrt(c.log_s)).epsilon(1e-15));
      CHECK(c.a < std::sqrt(c.log_s));
      CHECK(c.alpha == doctest::Approx(c.a * std::sqrt(c.log_s)).epsilon(1e-14));
      CHECK(c.a == doctest::Approx(a_direct(c.s)).epsilon(1e-13));
      // u_n is a double near 2n; the round trip cannot beat one ulp of it.
      const double floor_tol = 2.0 * std::nextafter(c.center, INFINITY) - 2.0 * c.center;
      for (double x : {-2.0, 0.0, 3.0}) {
        const double back = (u_n(c, x) - c.center) / c.width;
        CHECK(std::abs(back - (c.a + c.b * x)) <= std::max(1e-12 * std::abs(c.a + c.b * x), floor_tol / c.width));
      }
    }
    const auto c0 = scaling_constants({n, 0});
    CHECK(c0.s > prev_s);
    CHECK(c0.log_s > prev_l);
    CHECK(c0.alpha > prev_alpha);
    prev_s = c0.s;
    prev_l = c0.log_s;
    prev_alpha = c0.alpha;
  }
  const auto c = scaling_constants({1000000, 0});
  const double m1 = std::ceil(std::sqrt(c.s));
  CHECK(std::abs(w_tilde(c, m1, -c.alpha) - 1.0) <= 2.0 / std::sqrt(c.s));
  CHECK(w_tilde(c, 3, 0.5) > w_tilde(c, 2, 0.5));
  CHECK(w_tilde(c, 2, 0.6) > w_tilde(c, 2, 0.5));
}

TEST_CASE("ell1 applicability") {
  CHECK_FALSE(scaling_constants({10, 0}).ell1_applicable);  // log log 5 < 1/2
  CHECK(scaling_constants({1000, 0}).ell1_applicable);
}
