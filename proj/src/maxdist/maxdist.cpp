#include "chiral/maxdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chiral/errors.hpp"
#include "chiral/quad.hpp"
#include "chiral/specfun.hpp"

namespace chiral {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-746) is zero in double.
constexpr double kUnderflowLog = 746.0;
constexpr std::int64_t kEulerHead = 256;

// -log P(2nY_j <= u) for j = n - k, as a function of the offset k.
class Terms {
 public:
  Terms(const CdfCurve& c, double x) : curve_(c), x_(x), u_(u_n(c.constants, x)) {
    const auto& p = c.params;
    const double n = static_cast<double>(p.n);
    const double v = static_cast<double>(p.v);
    const auto& k = c.constants;
    // u - (2n + v - 1/2), with 2 sqrt(n(n+v)) - (2n+v) = -v^2 / (2 sqrt(n(n+v)) + 2n + v).
    d0_ = -v * v / (k.center + 2.0 * n + v) + 0.5 + k.width * (k.a + k.b * x);
  }

  double u() const { return u_; }

  double at(std::int64_t k) const {
    if (curve_.engine == Engine::gamma_approx) return at_real(static_cast<double>(k));
    RadialLaw law;
    law.params = curve_.params;
    law.j = curve_.params.n - k;
    law.engine = curve_.engine;
    return from_split(tail_split(law, u_));
  }

  // Gamma engine only: shapes 2(n - k) + v - 1/2 for real k.
  double at_real(double k) const {
    const double a = 2.0 * (static_cast<double>(curve_.params.n) - k) +
                     static_cast<double>(curve_.params.v) - 0.5;
    const double d = d0_ + 2.0 * k;
    if (a + d <= 0.0) return kInf;
    const auto g = specfun::reg_gamma_offset(a, d);
    return from_split({g.p, g.q});
  }

 private:
  static double from_split(TailSplit s) {
    if (s.gt < 0.5) return -specfun::log1m(s.gt);
    if (s.le <= 0.0) return kInf;
    return -std::log(s.le);
  }

  const CdfCurve& curve_;
  double x_;
  double u_;
  double d0_ = 0;
};

// Euler-Maclaurin for sum_{k=lo}^{hi} f(k), hi - lo large and f smooth.
struct EulerSum {
  double value;
  double error;
};

EulerSum euler_maclaurin(const Terms& t, double lo, double hi) {
  auto f = [&](double k) { return t.at_real(k); };
  const auto q = quad::integrate(f, lo, hi, 1e-300, 1e-13);
  const double h = 2.0;
  auto d1 = [&](double k) { return (f(k + h) - f(k - h)) / (2.0 * h); };
  auto d3 = [&](double k) {
    return (f(k + 2 * h) - 2 * f(k + h) + 2 * f(k - h) - f(k - 2 * h)) / (2.0 * h * h * h);
  };
  const double b2 = (d1(hi) - d1(lo)) / 12.0;
  const double b4 = -(d3(hi) - d3(lo)) / 720.0;
  return {q.value + 0.5 * (f(lo) + f(hi)) + b2 + b4, q.error + std::abs(b4)};
}

}  // namespace

Engine auto_engine(const EnsembleParams& p) {
  p.validate();
  if (2 * p.n + p.v <= kExactMaxOrder && p.n <= kExactMaxJ) return Engine::exact_bessel;
  if (p.v <= kVGammaMax) return Engine::gamma_approx;
  return Engine::large_v;
}

CdfCurve make_curve(const EnsembleParams& p, std::optional<Engine> engine, double trunc_eps) {
  p.validate();
  if (!(trunc_eps > 0.0)) throw DomainError("make_curve: need trunc_eps > 0");
  CdfCurve c;
  c.params = p;
  c.constants = scaling_constants(p);
  c.engine = engine.value_or(auto_engine(p));
  c.trunc_eps = trunc_eps;
  RadialLaw probe;
  probe.params = p;
  probe.j = p.n;
  probe.engine = c.engine;
  probe.validate();
  if (c.engine == Engine::exact_bessel && (p.n > kExactMaxJ || 2 * p.n + p.v > kExactMaxOrder)) {
    throw AdmissibilityError("exact_bessel engine refused for n = " + std::to_string(p.n) +
                             ", v = " + std::to_string(p.v) + ": needs n <= " +
                             std::to_string(kExactMaxJ) + " and 2n+v <= " +
                             std::to_string(kExactMaxOrder));
  }
  return c;
}

EvalPoint cdf(const CdfCurve& curve, double x) {
  if (std::isnan(x)) throw DomainError("cdf: x is NaN");
  EvalPoint e;
  e.x = x;
  if (x == kInf) {
    e.cdf = 1.0;
    return e;
  }
  if (x <= -curve.constants.x0_left) {
    e.log_cdf = -kInf;
    return e;
  }
  const Terms t(curve, x);
  if (!(t.u() > 0.0)) {
    e.log_cdf = -kInf;
    return e;
  }
  const std::int64_t n = curve.params.n;

  // The top index has the heaviest tail; if it alone underflows, so does F_n.
  const double f0 = t.at(0);
  if (f0 >= kUnderflowLog) {
    e.log_cdf = -f0;
    e.terms_used = 1;
    return e;
  }

  auto bound = [&](std::int64_t jn) {
    if (jn >= n) return 0.0;
    const double f = t.at(jn);
    return f == 0.0 ? 0.0 : static_cast<double>(n - jn) * f;
  };
  const auto& c = curve.constants;
  std::int64_t hi = static_cast<std::int64_t>(std::ceil(4.0 * std::sqrt(c.s * c.log_s)));
  hi = std::clamp<std::int64_t>(hi, 1, n);
  std::int64_t lo = 0;
  double hi_bound = bound(hi);
  while (hi_bound > curve.trunc_eps) {
    lo = hi;
    hi = std::min(n, 2 * hi);
    hi_bound = bound(hi);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double b = bound(mid);
    if (b <= curve.trunc_eps) {
      hi = mid;
      hi_bound = b;
    } else {
      lo = mid;
    }
  }
  const std::int64_t jn = hi;

  double sum = 0.0;
  if (curve.engine == Engine::gamma_approx && jn > kDirectSumMax) {
    for (std::int64_t k = 0; k < kEulerHead; ++k) sum += t.at(k);
    const auto em = euler_maclaurin(t, static_cast<double>(kEulerHead), static_cast<double>(jn - 1));
    sum += em.value;
    e.sum_error = em.error;
  } else {
    for (std::int64_t k = 0; k < jn; ++k) {
      sum += t.at(k);
      if (sum >= kUnderflowLog) break;
    }
  }
  e.terms_used = jn;
  e.log_cdf = -sum;
  e.cdf = std::exp(e.log_cdf);
  e.trunc_bound = e.cdf == 0.0 ? 0.0 : hi_bound;

  auto& used = *curve.j_n_used;
  std::int64_t prev = used.load(std::memory_order_relaxed);
  while (prev < jn && !used.compare_exchange_weak(prev, jn, std::memory_order_relaxed)) {
  }
  return e;
}

double cdf_full_product(const CdfCurve& curve, double x) {
  if (x <= -curve.constants.x0_left) return 0.0;
  const Terms t(curve, x);
  if (!(t.u() > 0.0)) return 0.0;
  double sum = 0.0;
  for (std::int64_t k = 0; k < curve.params.n; ++k) sum += t.at(k);
  return std::exp(-sum);
}

double quantile(const CdfCurve& curve, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: need 0 < p < 1");
  const auto& c = curve.constants;
  double lo = -c.x0_left + 1e-9 * std::max(1.0, c.x0_left);
  double hi = c.ell2 + 20.0;
  const double f_lo = cdf(curve, lo).cdf;
  const double f_hi = cdf(curve, hi).cdf;
  if (!(f_lo <= p && p <= f_hi)) {
    throw BracketError("quantile: p = " + std::to_string(p) + " not bracketed by F(" +
                       std::to_string(lo) + ") = " + std::to_string(f_lo) + " and F(" +
                       std::to_string(hi) + ") = " + std::to_string(f_hi));
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double f = cdf(curve, mid).cdf;
    if (std::abs(f - p) <= 1e-10) return mid;
    (f < p ? lo : hi) = mid;
  }
  return hi;
}

double gumbel_gap(const CdfCurve& curve, double x) {
  return cdf(curve, x).cdf - specfun::gumbel_cdf(x);
}

}  // namespace chiral
