#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "chiral/errors.hpp"
#include "chiral/quad.hpp"
#include "chiral/radial.hpp"

namespace chiral {
namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

void check_geometry_args(const EnsembleParams& p, std::int64_t j) {
  p.validate();
  if (p.v < 1) throw DomainError("large-v geometry needs v >= 1");
  if (j < 1) throw DomainError("large-v geometry needs j >= 1");
}

// log(1 + y^2) without overflow for large y.
double log1p_sq(double y) {
  if (y > 1e8) return 2.0 * std::log(y) + std::log1p(1.0 / (y * y));
  return std::log1p(y * y);
}

}  // namespace

double tau_j(const EnsembleParams& p, std::int64_t j, double y) {
  check_geometry_args(p, j);
  if (!(y > 0.0)) throw DomainError("tau_j: need y > 0");
  const double v = static_cast<double>(p.v);
  const double s = std::hypot(1.0, y);
  return s - std::log1p(s) + log1p_sq(y) / (4.0 * v) -
         (2.0 * static_cast<double>(j) - 1.0) / v * std::log(y);
}

double v_tau_delta(const EnsembleParams& p, std::int64_t j, double mu, double d) {
  const double v = static_cast<double>(p.v);
  const double y = mu + d;
  if (!(y > 0.0)) return std::numeric_limits<double>::infinity();
  const double sy = std::hypot(1.0, y);
  const double sm = std::hypot(1.0, mu);
  const double sq = d * (2.0 * mu + d);  // y^2 - mu^2
  const double ds = sq / (sy + sm);
  return v * ds - v * std::log1p(ds / (1.0 + sm)) + 0.25 * std::log1p(sq / (1.0 + mu * mu)) -
         (2.0 * static_cast<double>(j) - 1.0) * std::log1p(d / mu);
}

LargeVGeometry large_v_geometry(const EnsembleParams& p, std::int64_t j) {
  check_geometry_args(p, j);
  const double jd = static_cast<double>(j);
  const double v = static_cast<double>(p.v);
  const double r = std::sqrt(jd * (jd + v));
  const double m = 2.0 * jd + v;
  LargeVGeometry g;
  g.mu_j = 2.0 * r / v;
  g.tau_at_mu = tau_j(p, j, g.mu_j);
  g.tau_prime_at_mu = 1.0 / (2.0 * r) + r / (m * m);
  g.beta_j = std::sqrt(m) / (2.0 * r);
  return g;
}

LargeVDetail tail_large_v_detail(const RadialLaw& law, double t, LargeVCoefficient coef) {
  law.validate();
  if (law.params.v < kLargeVMin) {
    throw AdmissibilityError("large_v engine needs v >= " + std::to_string(kLargeVMin));
  }
  if (!(t >= 0.0) || std::isnan(t)) throw DomainError("tail_large_v: need t >= 0");
  const auto& p = law.params;
  const double jd = static_cast<double>(law.j);
  const double v = static_cast<double>(p.v);
  const double m = 2.0 * jd + v;
  const auto g = large_v_geometry(p, law.j);
  const double c = std::sqrt(m) / v;
  const double z_min = -g.mu_j / c;

  LargeVDetail out;
  out.z_lo = std::isinf(t) ? t : (t - v * g.mu_j) / std::sqrt(m);
  if (t == 0.0 || out.z_lo <= z_min) {
    out.split = {0.0, 1.0};
    return out;
  }
  if (std::isinf(t)) {
    out.split = {1.0, 0.0};
    return out;
  }

  double log_pre = -0.5 * std::log(2.0 * std::numbers::pi);
  if (coef == LargeVCoefficient::exact_gamma) {
    log_pre = (v + 0.5) * std::numbers::ln2 + (m - 0.5) * std::log(v) +
              specfun::log_gamma(jd + v + 0.5) - specfun::log_gamma(2.0 * jd + 2.0 * v) -
              specfun::log_gamma(jd) + std::log(c) - v * g.tau_at_mu;
  }
  const double pre = std::exp(log_pre);
  auto f = [&](double z) { return std::exp(-v_tau_delta(p, law.j, g.mu_j, c * z)); };
  auto integrate = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a, b};
    if (a < 0.0 && b > 0.0) cuts = {a, 0.0, b};
    const double s = quad::integrate(f, cuts, 0.0, 1e-12).value;
    return s;
  };

  // Right-tail remainder past z = a, from exponent >= j beta h(z),
  // h(z) = z - log(1 + beta z) / beta.
  auto remainder = [&](double a) {
    const double ba = g.beta_j * a;
    return (1.0 + ba) / (jd * g.beta_j * g.beta_j * a) * std::exp(-jd * (ba - std::log1p(ba)));
  };

  double raw;
  bool upper;
  if (out.z_lo > 0.0) {
    double z_hi = std::max(12.0, out.z_lo + 6.0);
    for (int i = 0; i < 40 && pre * remainder(z_hi) > 1e-17; ++i) z_hi *= 1.5;
    raw = pre * integrate(out.z_lo, z_hi);
    out.remainder_bound = pre * remainder(z_hi);
    upper = true;
  } else {
    const double z_left = std::max(z_min, std::min(-12.0, out.z_lo - 6.0));
    raw = pre * integrate(z_left, out.z_lo);
    upper = false;
  }
  if (raw < 0.0 || raw > 1.0) {
    out.clamped = true;
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    raw = std::clamp(raw, 0.0, 1.0);
  }
  out.split = upper ? TailSplit{1.0 - raw, raw} : TailSplit{raw, 1.0 - raw};
  return out;
}

TailSplit split_large_v(const RadialLaw& law, double t) { return tail_large_v_detail(law, t).split; }

double tail_large_v(const RadialLaw& law, double t) { return split_large_v(law, t).gt; }

std::uint64_t large_v_clamp_events() { return g_clamp_events.load(std::memory_order_relaxed); }

}  // namespace chiral
