#include "chiral/scaling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chiral/errors.hpp"

namespace chiral {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

void EnsembleParams::validate() const {
  if (n < 1 || v < 0) {
    throw DomainError("ensemble: need n >= 1 and v >= 0 (got n=" + std::to_string(n) +
                      ", v=" + std::to_string(v) + ")");
  }
}

double s_of(const EnsembleParams& p) {
  const double n = static_cast<double>(p.n);
  const double v = static_cast<double>(p.v);
  return n * (n + v) / (2.0 * n + v);
}

std::int64_t min_admissible_n(std::int64_t v) {
  std::int64_t hi = 1;
  while (!(s_of({hi, v}) > std::numbers::e)) hi *= 2;
  std::int64_t lo = hi / 2;  // s(lo) <= e unless hi == 1
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (s_of({mid, v}) > std::numbers::e) hi = mid;
    else lo = mid;
  }
  return hi;
}

double a_of(double y) {
  const double l = std::log(y);
  // (l - log sqrt(2 pi) - log l) / sqrt(l); one division, no cancellation of two
  // large terms.
  return (l - kLogSqrt2Pi - std::log(l)) / std::sqrt(l);
}

ScalingConstants scaling_constants(const EnsembleParams& p) {
  p.validate();
  ScalingConstants c;
  c.s = s_of(p);
  if (!(c.s > std::numbers::e)) {
    throw AdmissibilityError("scaling: s_n = " + std::to_string(c.s) +
                             " <= e; need n >= " + std::to_string(min_admissible_n(p.v)) +
                             " for v = " + std::to_string(p.v));
  }
  const double n = static_cast<double>(p.n);
  const double v = static_cast<double>(p.v);
  c.log_s = std::log(c.s);
  const double sl = std::sqrt(c.log_s);
  const double lls = std::log(c.log_s);
  c.a = a_of(c.s);
  c.b = 1.0 / sl;
  c.alpha = c.a * sl;
  c.ell1 = std::log(2.0 * lls);
  c.ell1_applicable = lls > 0.5;
  c.ell2 = kLogSqrt2Pi + lls;
  c.center = 2.0 * std::sqrt(n * (n + v));
  c.width = std::sqrt(2.0 * n + v);
  // center / width = 2 sqrt(s), so u_n(x) = 0 at x = -(2 sqrt(s) + a) / b.
  c.x0_left = (2.0 * std::sqrt(c.s) + c.a) * sl;
  c.x0_closed = c.log_s + 2.0 * std::sqrt(c.s * c.log_s);
  return c;
}

double u_n(const ScalingConstants& c, double x) { return c.center + c.width * (c.a + c.b * x); }

double x_of_u(const ScalingConstants& c, double t) {
  return ((t - c.center) / c.width - c.a) / c.b;
}

double w_tilde(const ScalingConstants& c, double k, double x) {
  return k / std::sqrt(c.s) + c.a + c.b * x;
}

}  // namespace chiral
