#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "chiral/errors.hpp"
#include "chiral/radial.hpp"
#include "chiral/scaling.hpp"

using namespace chiral;

namespace {

RadialLaw law(std::int64_t n, std::int64_t v, std::int64_t j, Engine e = Engine::exact_bessel) {
  RadialLaw l;
  l.params = {n, v};
  l.j = j;
  l.engine = e;
  return l;
}

// Z_j by exp-sinh quadrature on boost's K_v, normalized by `log_ref`.
double z_by_quadrature(double j, double v, double log_ref) {
  boost::math::quadrature::exp_sinh<double> q;
  auto f = [&](double y) {
    if (y < 1e-10) return 0.0;
    double k = 0;
    try {
      k = boost::math::cyl_bessel_k(v, y);
    } catch (const std::overflow_error&) {
      return 0.0;
    }
    if (k == 0) return 0.0;
    return std::exp((2 * j + v - 1) * std::log(y) + std::log(k) - log_ref);
  };
  return q.integrate(f, 1e-15);
}

}  // namespace

TEST_CASE("normalization constants") {
  CHECK(std::abs(log_norm_const({1, 0}, 1)) < 1e-14);
  CHECK(std::exp(log_norm_const({1, 1}, 1)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::exp(log_norm_const({2, 0}, 2)) == doctest::Approx(4.0).epsilon(1e-12));
  for (std::int64_t v : {0, 1, 2, 5, 10}) {
    for (std::int64_t j : {1, 2, 7, 20, 50}) {
      const double lz = log_norm_const({j, v}, j);
      INFO("j=" << j << " v=" << v);
      CHECK(std::abs(z_by_quadrature(double(j), double(v), lz) - 1.0) < 1e-9);
      // Mellin form 2^{2j+v-2} Gamma(j) Gamma(j+v).
      const double mellin = (2.0 * j + v - 2) * std::numbers::ln2 + std::lgamma(double(j)) +
                            std::lgamma(double(j + v));
      CHECK(std::abs(lz - mellin) < 1e-10 * std::max(1.0, std::abs(lz)));
    }
  }
  CHECK(std::isfinite(log_norm_const({1000000000000LL, 5}, 1000000000000LL)));
  CHECK_THROWS_AS(log_norm_const({3, 0}, 0), DomainError);
}

TEST_CASE("closed-form tail t K_1(t)") {
  const auto l = law(1, 0, 1);
  for (double t : {0.05, 0.5, 1.0, 5.0, 20.0}) {
    const double ref = t * boost::math::cyl_bessel_k(1.0, t);
    CHECK(std::abs(tail_exact(l, t) - ref) < 1e-12);
    CHECK(std::abs(tail_product_gamma_oracle(l, t) - ref) < 1e-12);
  }
  CHECK(tail_exact(l, 1.0) == doctest::Approx(0.6019072302).epsilon(1e-9));
  CHECK(tail_exact(l, 0.0) == 1.0);
  // Right tail: ratio to sqrt(pi t / 2) e^{-t} tends to 1.
  double prev = INFINITY;
  for (double t : {10.0, 40.0, 160.0, 600.0}) {
    const auto sp = split_exact(l, t);
    const double err = std::abs(sp.gt / (std::sqrt(std::numbers::pi * t / 2) * std::exp(-t)) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("engine agreement with product-gamma oracle") {
  for (std::int64_t v : {0, 1, 2, 5}) {
    for (std::int64_t j = 1; j <= 50; j += (j < 5 ? 1 : 7)) {
      const double a = 2.0 * j + v - 0.5;
      for (double q : {0.25, 0.5, 0.75}) {
        const double t = boost::math::gamma_q_inv(a, q);
        const auto l = law(j, v, j);
        const auto e = split_exact(l, t);
        const auto o = split_product_gamma_oracle(l, t);
        INFO("j=" << j << " v=" << v << " t=" << t);
        CHECK(std::abs(e.gt - o.gt) < 1e-9);
        CHECK(std::abs(e.le + e.gt - 1.0) < 1e-15);
      }
    }
  }
  CHECK(tail_product_gamma_oracle(law(2, 0, 2), 2.0) ==
        doctest::Approx(tail_exact(law(2, 0, 2), 2.0)).epsilon(1e-9));
  CHECK(tail_product_gamma_oracle(law(3, 0, 2), 0.0) == 1.0);
  CHECK_THROWS_AS(tail_product_gamma_oracle(law(600, 0, 501), 3.0), FeasibilityError);
}

TEST_CASE("deep tails keep relative accuracy") {
  const auto l = law(1, 0, 1);
  // P(2Y > t) = t K_1(t) far right; P(2Y <= t) ~ (t^2/4)(-log(t/2)+...) far left.
  const double t = 300.0;
  const double ref = t * boost::math::cyl_bessel_k(1.0, t);
  CHECK(std::abs(split_exact(l, t).gt / ref - 1.0) < 1e-10);
  const double s = 1e-6;
  // 1 - s K_1(s) = -(s^2/2)(log(s/2) + gamma - 1/2) + O(s^4 log s).
  const double le_ref = -0.5 * s * s * (std::log(s / 2) + std::numbers::egamma - 0.5);
  CHECK(std::abs(split_exact(l, s).le / le_ref - 1.0) < 1e-9);
  CHECK(split_exact(l, s).le == doctest::Approx(split_product_gamma_oracle(l, s).le).epsilon(1e-8));
}

TEST_CASE("normalization and monotonicity") {
  for (std::int64_t j : {1, 3, 40, 2000}) {
    const auto l = law(j, 3, j);
    CHECK(tail_exact(l, 0.0) == 1.0);
    CHECK(tail_exact(l, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 1.0;
    const double m = 2.0 * j + 3;
    for (double t = 0.1 * m; t < 2 * m + 20; t += 0.05 * m) {
      const double q = tail_exact(l, t);
      CHECK(q <= prev);
      CHECK(q >= 0.0);
      prev = q;
    }
  }
  // Stochastic monotonicity in j.
  for (double t : {5.0, 20.0, 60.0}) {
    double prev = 0;
    for (std::int64_t j = 1; j <= 40; ++j) {
      const double q = tail_exact(law(40, 1, j), t);
      CHECK(q >= prev);
      prev = q;
    }
  }
  CHECK_THROWS_AS(tail_exact(law(20000, 0, 10001), 1.0), FeasibilityError);
  CHECK_THROWS_AS(tail_exact(law(30000, 30001, 10000), 1.0), FeasibilityError);
}

TEST_CASE("gamma surrogate") {
  const auto l = law(2, 0, 1, Engine::gamma_approx);  // shape 3/2
  const double q32 = std::erfc(std::sqrt(3.0)) + 2 * std::sqrt(3.0 / std::numbers::pi) * std::exp(-3.0);
  CHECK(tail_gamma(l, 3.0) == doctest::Approx(q32).epsilon(1e-13));
  CHECK(tail_gamma(l, 0.0) == 1.0);
  CHECK_THROWS_AS(tail_gamma(law(100, 65, 3, Engine::gamma_approx), 1.0), AdmissibilityError);

  const auto c = scaling_constants({1000, 1});
  const double t = u_n(c, 0.0);
  const double ex = tail_exact(law(1000, 1, 1000), t);
  const double ga = tail_gamma(law(1000, 1, 1000, Engine::gamma_approx), t);
  CHECK(std::abs(ga / ex - 1.0) < 5e-3);
}

static void check_mills(std::int64_t k) {
  const auto c = scaling_constants({1000, 1});
  {
    for (double x = -1.0; x <= 4.0; x += 0.25) {
      const double w = w_tilde(c, double(k), x);
      const double q = tail_gamma(law(1000, 1, 1000 - k, Engine::gamma_approx), u_n(c, x));
      const double mills = std::exp(-w * w / 2) / (std::sqrt(2 * std::numbers::pi) * w);
      INFO("k=" << k << " x=" << x << " w=" << w);
      CHECK(std::abs(q / mills - 1.0) <= 5.0 / (w * w));
    }
  }
}

TEST_CASE("Mills-type asymptotic of the gamma tail") {
  check_mills(0);
  check_mills(10);
}

// w~ is 5.5 to 7.5 here, far above n^{1/10} ~ 2; the gamma skewness term
// dominates the 1/w~^2 correction.
TEST_CASE("Mills-type asymptotic, k = 100" * doctest::may_fail()) { check_mills(100); }

TEST_CASE("large-v geometry") {
  const EnsembleParams p{10, 4};
  const auto g = large_v_geometry(p, 3);
  CHECK(g.mu_j == doctest::Approx(std::sqrt(21.0) / 2).epsilon(1e-14));
  CHECK(1 + g.mu_j * g.mu_j == doctest::Approx(6.25).epsilon(1e-13));
  CHECK(g.tau_prime_at_mu == doctest::Approx(1 / (2 * std::sqrt(21.0)) + std::sqrt(21.0) / 100).epsilon(1e-14));
  CHECK(g.tau_prime_at_mu == doctest::Approx(0.1549346).epsilon(1e-6));
  const double h = 1e-5;
  const double fd = (tau_j(p, 3, g.mu_j + h) - tau_j(p, 3, g.mu_j - h)) / (2 * h);
  CHECK(fd == doctest::Approx(g.tau_prime_at_mu).epsilon(1e-8));
  CHECK(g.beta_j == doctest::Approx(std::sqrt(10.0) / (2 * std::sqrt(21.0))).epsilon(1e-14));

  for (std::int64_t v : {1, 4, 50, 1000}) {
    for (std::int64_t j : {1, 3, 200, 100000}) {
      const EnsembleParams pp{j, v};
      const auto gg = large_v_geometry(pp, j);
      const double jd = double(j), vd = double(v);
      CHECK(1 + gg.mu_j * gg.mu_j == doctest::Approx(std::pow((2 * jd + vd) / vd, 2)).epsilon(1e-12));
      // Expanded closed form of v tau_j(mu_j), with the 1/2 log(2j+v) term.
      const double closed = 2 * jd + vd - (vd + 2 * jd - 1) * std::numbers::ln2 +
                            (vd + 2 * jd - 1.5) * std::log(vd) - (vd + jd - 0.5) * std::log(jd + vd) -
                            (jd - 0.5) * std::log(jd) + 0.5 * std::log(2 * jd + vd);
      CHECK(vd * gg.tau_at_mu == doctest::Approx(closed).epsilon(1e-9));
      // Delta form agrees with the difference of two direct evaluations.
      const double d = 0.3 * std::sqrt(2 * jd + vd) / vd;
      CHECK(v_tau_delta(pp, j, gg.mu_j, d) ==
            doctest::Approx(vd * (tau_j(pp, j, gg.mu_j + d) - gg.tau_at_mu)).epsilon(1e-6));
      CHECK(v_tau_delta(pp, j, gg.mu_j, 0.0) == 0.0);
    }
  }
  CHECK(std::isfinite(tau_j(p, 3, 1e8)));
  CHECK(tau_j(p, 3, 1e8) == doctest::Approx(1e8 - std::log1p(1e8) + std::log(1e8) / 8 - 5.0 / 4 * std::log(1e8)).epsilon(1e-12));
  CHECK_THROWS_AS(tau_j({3, 0}, 1, 1.0), DomainError);
}

TEST_CASE("tail bound via h(z)") {
  // exponent v (tau(mu + c z) - tau(mu)) >= j beta h(z) for z >= 0.
  for (std::int64_t v : {1, 20, 50, 100, 1000}) {
    for (std::int64_t j : {1, 10, 200, 5000}) {
      const EnsembleParams p{j, v};
      const auto g = large_v_geometry(p, j);
      const double c = std::sqrt(2.0 * j + v) / v;
      for (double z = 0.5; z < 40; z *= 1.5) {
        const double h = z - std::log1p(g.beta_j * z) / g.beta_j;
        CHECK(v_tau_delta(p, j, g.mu_j, c * z) >= j * g.beta_j * h - 1e-9);
      }
    }
  }
}

TEST_CASE("large-v engine") {
  const EnsembleParams p{200, 50};
  const auto c = scaling_constants(p);
  for (double x : {-1.0, 0.0, 2.0}) {
    const double t = u_n(c, x);
    const double ex = tail_exact(law(200, 50, 200), t);
    const double lv = tail_large_v(law(200, 50, 200, Engine::large_v), t);
    CHECK(std::abs(lv / ex - 1.0) <= 0.1);
    CHECK(std::abs(lv / ex - 1.0) <= 5.0 / 50);
  }
  const auto d = tail_large_v_detail(law(200, 50, 200, Engine::large_v), u_n(c, 0.0));
  CHECK(d.remainder_bound < 1e-16);
  CHECK(tail_large_v(law(200, 50, 200, Engine::large_v), 0.0) == doctest::Approx(1.0).epsilon(0.1));
  CHECK_THROWS_AS(tail_large_v(law(200, 19, 5, Engine::large_v), 1.0), AdmissibilityError);
  // Total mass of the Laplace form is within O(1/v) of 1.
  const auto lo = tail_large_v_detail(law(200, 50, 7, Engine::large_v), 1e-9);
  CHECK(lo.split.gt == 1.0);
  // The exact-gamma prefactor only differs by the Stirling step.
  for (std::int64_t v : {50, 100}) {
    const auto cc = scaling_constants({200, v});
    const auto l = law(200, v, 200, Engine::large_v);
    const double t = u_n(cc, 0.0);
    const double a = tail_large_v_detail(l, t, LargeVCoefficient::rewritten).split.gt;
    const double b = tail_large_v_detail(l, t, LargeVCoefficient::exact_gamma).split.gt;
    CHECK(std::abs(a / b - 1.0) < 1.0 / v);
  }
}

TEST_CASE("radial sampler") {
  const auto l = law(1, 0, 1);
  const auto a = sample_radial(l, 100000, 42);
  const auto b = sample_radial(l, 100000, 42);
  CHECK(a == b);
  CHECK(*std::min_element(a.begin(), a.end()) > 0.0);
  for (double t : {0.5, 1.0, 3.0}) {
    const double p = tail_exact(l, t);
    const double emp = std::count_if(a.begin(), a.end(), [&](double x) { return x > t; }) / double(a.size());
    const double sigma = std::sqrt(p * (1 - p) / a.size());
    CHECK(std::abs(emp - p) < 4 * sigma);
  }
  CHECK(std::abs(tail_exact(l, 1.0) - 0.60191) < 1e-5);
  const auto c = sample_radial(law(20, 3, 7), 20000, 9);
  for (double t : {12.0, 17.0, 24.0}) {
    const double p = tail_exact(law(20, 3, 7), t);
    const double emp = std::count_if(c.begin(), c.end(), [&](double x) { return x > t; }) / double(c.size());
    CHECK(std::abs(emp - p) < 4 * std::sqrt(p * (1 - p) / c.size()));
  }
  CHECK(sample_radial(l, 10, 43) != sample_radial(l, 10, 42));
}
