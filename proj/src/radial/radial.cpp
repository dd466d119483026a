#include "chiral/radial.hpp"

#include <boost/math/tools/minima.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "chiral/errors.hpp"
#include "chiral/quad.hpp"
#include "chiral/rng.hpp"

namespace chiral {
namespace {

constexpr double kLogDrop = 80.0;  // e^{-80} ~ 1.8e-35
constexpr double kQuadTol = 1e-13;

std::string law_str(const RadialLaw& law) {
  return "(n=" + std::to_string(law.params.n) + ", v=" + std::to_string(law.params.v) +
         ", j=" + std::to_string(law.j) + ")";
}

TailSplit from_le(double le) {
  le = std::clamp(le, 0.0, 1.0);
  return {le, 1.0 - le};
}

TailSplit from_gt(double gt) {
  gt = std::clamp(gt, 0.0, 1.0);
  return {1.0 - gt, gt};
}

// Integral of exp(phi) over [a, b] with the exponent shifted by `ref`.
template <class F>
double shifted_integral(F phi, double ref, double a, double b) {
  if (!(b > a)) return 0.0;
  auto f = [&](double w) { return std::exp(phi(w) - ref); };
  return quad::integrate(f, a, b, 0.0, kQuadTol).value;
}

// Walk from `from` in direction `dir` until phi has fallen kLogDrop below
// `level`, assuming phi is monotone on the way (true beyond the mode).
template <class F>
double walk_out(F phi, double from, int dir, double level, double step, double limit) {
  double w = from;
  for (int i = 0; i < 200; ++i) {
    w += dir * step;
    if ((dir < 0 && w <= limit) || (dir > 0 && w >= limit)) return limit;
    if (phi(w) < level - kLogDrop) return w;
    step *= 1.6;
  }
  return w;
}

}  // namespace

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::exact_bessel: return "exact_bessel";
    case Engine::gamma_approx: return "gamma_approx";
    case Engine::large_v: return "large_v";
  }
  return "?";
}

Engine parse_engine(std::string_view s) {
  if (s == "exact_bessel" || s == "exact") return Engine::exact_bessel;
  if (s == "gamma_approx" || s == "gamma") return Engine::gamma_approx;
  if (s == "large_v") return Engine::large_v;
  throw DomainError("unknown engine '" + std::string(s) +
                    "' (expected exact_bessel, gamma_approx or large_v)");
}

void RadialLaw::validate() const {
  params.validate();
  accuracy.validate();
  if (j < 1 || j > params.n) {
    throw DomainError("radial: need 1 <= j <= n " + law_str(*this));
  }
  if (engine == Engine::gamma_approx && params.v > kVGammaMax) {
    throw AdmissibilityError("gamma_approx engine refused for v = " + std::to_string(params.v) +
                             " > " + std::to_string(kVGammaMax) + "; use large_v");
  }
  if (engine == Engine::large_v && params.v < kLargeVMin) {
    throw AdmissibilityError("large_v engine needs v >= " + std::to_string(kLargeVMin) +
                             " (got v = " + std::to_string(params.v) + ")");
  }
}

double log_norm_const(const EnsembleParams& p, std::int64_t j) {
  p.validate();
  if (j < 1) throw DomainError("log_norm_const: need j >= 1");
  const double jd = static_cast<double>(j);
  const double v = static_cast<double>(p.v);
  return 0.5 * std::log(std::numbers::pi) + specfun::log_gamma(2 * jd + 2 * v) +
         specfun::log_gamma(jd) - (v + 1) * std::numbers::ln2 -
         specfun::log_gamma(jd + v + 0.5);
}

TailSplit split_exact(const RadialLaw& law, double t) {
  law.validate();
  if (law.engine != Engine::exact_bessel) {
    throw DomainError("split_exact called with engine " + std::string(engine_name(law.engine)));
  }
  const auto& p = law.params;
  if (law.j > kExactMaxJ || 2 * law.j + p.v > kExactMaxOrder) {
    throw FeasibilityError("exact_bessel quadrature infeasible for " + law_str(law) +
                           ": need j <= " + std::to_string(kExactMaxJ) + " and 2j+v <= " +
                           std::to_string(kExactMaxOrder));
  }
  if (!(t >= 0.0) || std::isnan(t)) throw DomainError("tail_exact: need t >= 0");
  if (t == 0.0) return {0.0, 1.0};
  if (std::isinf(t)) return {1.0, 0.0};

  const double v = static_cast<double>(p.v);
  const double m = 2.0 * static_cast<double>(law.j) + v;
  // Work in w = log(t / T); the density of w is exp(phi(w) + const).
  const double T = m - 0.5;
  const double lk0 = specfun::log_bessel_k_scaled(v, T);
  auto phi = [&](double w) {
    return m * w - T * std::expm1(w) + (specfun::log_bessel_k_scaled(v, T * std::exp(w)) - lk0);
  };

  const auto peak = boost::math::tools::brent_find_minima(
      [&](double w) { return -phi(w); }, -4.0, 4.0, 40);
  const double w_star = peak.first;
  const double phi_max = -peak.second;
  const double sd = 1.0 / std::sqrt(m);
  const double w_t = std::log(t / T);
  const double lo_limit = std::log(std::numeric_limits<double>::min() / T) + 1.0;
  const double hi_limit = std::log(std::numeric_limits<double>::max() / T) - 1.0;

  // The small side is integrated relative to its own level so that it keeps
  // full relative accuracy far out in the tails.
  const double ref = phi(w_t);
  if (w_t <= w_star) {
    const double wl = walk_out(phi, w_t, -1, ref, sd, lo_limit);
    const double small = shifted_integral(phi, ref, wl, w_t);
    const double wr = walk_out(phi, w_star, +1, phi_max, sd, hi_limit);
    const double big = shifted_integral(phi, phi_max, w_t, w_star) +
                       shifted_integral(phi, phi_max, w_star, wr);
    const double small_scaled = small * std::exp(ref - phi_max);
    return from_le(small_scaled / (small_scaled + big));
  }
  const double wr = walk_out(phi, w_t, +1, ref, sd, hi_limit);
  const double small = shifted_integral(phi, ref, w_t, wr);
  const double wl = walk_out(phi, w_star, -1, phi_max, sd, lo_limit);
  const double big = shifted_integral(phi, phi_max, wl, w_star) +
                     shifted_integral(phi, phi_max, w_star, w_t);
  const double small_scaled = small * std::exp(ref - phi_max);
  return from_gt(small_scaled / (small_scaled + big));
}

double tail_exact(const RadialLaw& law, double t) { return split_exact(law, t).gt; }

TailSplit split_gamma(const RadialLaw& law, double t) {
  law.validate();
  if (law.engine != Engine::gamma_approx) {
    throw DomainError("split_gamma called with engine " + std::string(engine_name(law.engine)));
  }
  if (!(t >= 0.0) || std::isnan(t)) throw DomainError("tail_gamma: need t >= 0");
  const double a = 2.0 * static_cast<double>(law.j) + static_cast<double>(law.params.v) - 0.5;
  const auto g = specfun::reg_gamma(a, t);
  return {g.p, g.q};
}

double tail_gamma(const RadialLaw& law, double t) { return split_gamma(law, t).gt; }

TailSplit split_product_gamma_oracle(const RadialLaw& law, double t) {
  law.params.validate();
  if (law.j < 1 || law.j > law.params.n) throw DomainError("oracle: need 1 <= j <= n");
  if (law.j > kOracleMaxJ) {
    throw FeasibilityError("product-gamma oracle limited to j <= " + std::to_string(kOracleMaxJ));
  }
  if (!(t >= 0.0) || std::isnan(t)) throw DomainError("oracle: need t >= 0");
  if (t == 0.0) return {0.0, 1.0};
  const double j = static_cast<double>(law.j);
  const double a2 = j + static_cast<double>(law.params.v);
  const double c = 0.25 * t * t;
  // G1 = j e^w; log density of w (Jacobian included) relative to its peak at w = 0.
  auto phi = [&](double w) { return j * w - j * std::expm1(w); };
  const double sd = 1.0 / std::sqrt(j);
  const double wl = walk_out(phi, 0.0, -1, 0.0, sd, -700.0);
  const double wr = walk_out(phi, 0.0, +1, 0.0, sd, 700.0);
  const double log_norm = j * std::log(j) - j - specfun::log_gamma(j);
  // Split where the inner argument c/g crosses the inner shape.
  double w_mid = std::log(c / (a2 * j));
  w_mid = std::clamp(w_mid, wl, wr);
  auto piece = [&](bool upper) {
    auto f = [&](double w) {
      const auto g = specfun::reg_gamma(a2, c / (j * std::exp(w)));
      return std::exp(phi(w) + log_norm) * (upper ? g.q : g.p);
    };
    double s = 0;
    const double cuts[4] = {wl, std::min(0.0, w_mid), std::max(0.0, w_mid), wr};
    for (int i = 0; i < 3; ++i) {
      if (cuts[i + 1] > cuts[i]) s += quad::integrate(f, cuts[i], cuts[i + 1], 1e-16, 1e-13).value;
    }
    return s;
  };
  const double gt = piece(true);
  if (gt < 0.5) return from_gt(gt);
  return from_le(piece(false));
}

double tail_product_gamma_oracle(const RadialLaw& law, double t) {
  return split_product_gamma_oracle(law, t).gt;
}

TailSplit tail_split(const RadialLaw& law, double t) {
  switch (law.engine) {
    case Engine::exact_bessel: return split_exact(law, t);
    case Engine::gamma_approx: return split_gamma(law, t);
    case Engine::large_v: return split_large_v(law, t);
  }
  throw DomainError("tail_split: bad engine");
}

std::vector<double> sample_radial(const RadialLaw& law, std::int64_t count, std::uint64_t seed) {
  law.params.validate();
  if (law.j < 1 || law.j > law.params.n) throw DomainError("sample_radial: need 1 <= j <= n");
  if (count < 1) throw DomainError("sample_radial: need count >= 1");
  const double j = static_cast<double>(law.j);
  const double jv = j + static_cast<double>(law.params.v);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(i), kTagRadial);
    std::gamma_distribution<double> g1(j, 1.0);
    std::gamma_distribution<double> g2(jv, 1.0);
    const double a = g1(rng);
    const double b = g2(rng);
    out[static_cast<std::size_t>(i)] = 2.0 * std::sqrt(a * b);
  }
  return out;
}

}  // namespace chiral
