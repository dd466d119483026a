#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "chiral/errors.hpp"
#include "chiral/specfun.hpp"

namespace chiral::specfun {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-17;
constexpr int kMaxIter = 100000;

// Taylor coefficients of 1/Gamma(1 + z) around z = 0 (Abramowitz & Stegun
// 6.1.34, shifted by one index).
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

struct RecipGammaPair {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

RecipGammaPair recip_gamma_pair(double mu) {
  double even = 0.0;
  double odd = 0.0;
  const double mu2 = mu * mu;
  double pw = 1.0;
  for (std::size_t k = 0; k + 1 < kRecipGamma.size(); k += 2) {
    even += kRecipGamma[k] * pw;
    odd += kRecipGamma[k + 1] * pw;
    pw *= mu2;
  }
  // `odd` holds sum c_{2m+1} mu^{2m}; the odd part of the series is mu * odd.
  return {-odd, even, even + mu * odd, even - mu * odd};
}

void check_args(double v, double x) {
  if (!std::isfinite(v) || !std::isfinite(x) || v < 0.0 || x <= 0.0) {
    throw DomainError("bessel_k: need v >= 0 and x > 0 (got v=" + std::to_string(v) +
                      ", x=" + std::to_string(x) + ")");
  }
}

// Scaled K_mu and K_{mu+1} (times e^x) for |mu| <= 1/2.
struct KPair {
  double kmu;
  double kmu1;
};

KPair temme_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const auto g = recip_gamma_pair(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i < kMaxIter; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= (di - mu);
    q /= (di + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - di * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  const double ex = std::exp(x);
  return {sum * ex, sum1 * (2.0 / x) * ex};
}

// Steed's continued fraction (Temme's CF2), already scaled by e^x.
KPair steed_cf2(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < kMaxIter; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  const double kmu = std::sqrt(kPi / (2.0 * x)) / s;
  return {kmu, kmu * (mu + x + 0.5 - h) / x};
}

}  // namespace

double log_bessel_k_scaled(double v, double x) {
  check_args(v, x);
  const double nl = std::floor(v + 0.5);
  const double mu = v - nl;
  KPair k = x <= 2.0 ? temme_series(mu, x) : steed_cf2(mu, x);
  double kmu = k.kmu;
  double k1 = k.kmu1;
  double log_scale = 0.0;
  const double xi2 = 2.0 / x;
  const auto steps = static_cast<long long>(nl);
  for (long long i = 1; i <= steps; ++i) {
    const double next = (mu + static_cast<double>(i)) * xi2 * k1 + kmu;
    kmu = k1;
    k1 = next;
    if (k1 > 1e250) {
      kmu /= k1;
      log_scale += std::log(k1);
      k1 = 1.0;
    }
  }
  return std::log(kmu) + log_scale;
}

double bessel_k_scaled(double v, double x) {
  const double lk = log_bessel_k_scaled(v, x);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("bessel_k_scaled: e^x K_v(x) overflows for v=" + std::to_string(v) +
                        ", x=" + std::to_string(x) + " (use log_bessel_k_scaled)");
  }
  return std::exp(lk);
}

double log_bessel_k_uniform(double v, double x, int terms) {
  if (!std::isfinite(v) || v < kUniformMinOrder) {
    throw DomainError("bessel_k_uniform: order must be >= 20 (got " + std::to_string(v) +
                      "); use bessel_k_scaled below that");
  }
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("bessel_k_uniform: need x > 0");
  }
  if (terms < 0 || terms > 4) {
    throw DomainError("bessel_k_uniform: terms must be in [0, 4]");
  }
  const double r = std::hypot(1.0, x);
  const double eta = r + std::log(x / (1.0 + r));
  const double p = 1.0 / r;
  const double p2 = p * p;
  // Debye polynomials u_k(p).
  const std::array<double, 5> u = {
      1.0,
      p * (3.0 - 5.0 * p2) / 24.0,
      p2 * (81.0 + p2 * (-462.0 + p2 * 385.0)) / 1152.0,
      p * p2 * (30375.0 + p2 * (-369603.0 + p2 * (765765.0 - p2 * 425425.0))) / 414720.0,
      p2 * p2 *
          (4465125.0 +
           p2 * (-94121676.0 + p2 * (349922430.0 + p2 * (-446185740.0 + p2 * 185910725.0)))) /
          39813120.0,
  };
  double series = 0.0;
  double vk = 1.0;
  for (int k = 0; k <= terms; ++k) {
    series += ((k % 2 == 0) ? 1.0 : -1.0) * u[static_cast<std::size_t>(k)] / vk;
    vk *= v;
  }
  return 0.5 * std::log(kPi / (2.0 * v)) - v * eta - 0.5 * std::log(r) + std::log(series);
}

double bessel_k_uniform(double v, double x, int terms) {
  const double lk = log_bessel_k_uniform(v, x, terms);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("bessel_k_uniform: K_v(v x) overflows; use log_bessel_k_uniform");
  }
  return std::exp(lk);
}

}  // namespace chiral::specfun
