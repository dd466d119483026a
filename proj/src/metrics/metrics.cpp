#include "chiral/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "chiral/errors.hpp"
#include "chiral/parallel.hpp"
#include "chiral/quad.hpp"
#include "chiral/specfun.hpp"

namespace chiral {
namespace {

constexpr double kWindowLeft = 40.0;
constexpr double kWindowRight = 40.0;
constexpr double kKsCertTol = 1e-10;
constexpr double kKsMinCell = 1e-6;
constexpr int kKsMaxSplits = 20000;
constexpr int kKsPeaks = 5;

double lambda(double x) { return specfun::gumbel_cdf(x); }

// int_{-inf}^{X} e^{-e^{-x}} dx = E1(e^{-X}) <= e^{-e^{-X}} e^{X}.
double gumbel_left_mass(double x) { return std::exp(-std::exp(-x) + x); }

// Maximize h on [a, b] by golden section; returns (argmax, max).
template <class H>
std::pair<double, double> golden_max(H h, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = h(c);
  double fd = h(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = h(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

CdfView curve_view(const CdfCurve& curve) {
  const auto& c = curve.constants;
  CdfView v;
  v.cdf = [curve](double x) { return cdf(curve, x).cdf; };
  v.left = -c.x0_left;
  v.hi_mark = c.ell2;
  v.lo_mark = c.ell1_applicable ? std::min(-c.ell1, c.ell2 - 1.0) : -1.0;
  v.left_mass = [](double) { return 0.0; };
  // 1 - F <= -log F, and -log F decays at least like e^{-x/2} past the
  // window (each index tail is gamma-like with rate >= 1/2 on the X_n scale).
  v.right_mass = [curve](double x) {
    const auto e = cdf(curve, x);
    return 2.0 * (-e.log_cdf + e.trunc_bound);
  };
  v.seed = x_star(c);
  return v;
}

CdfView shifted_gumbel_view(double c) {
  CdfView v;
  v.cdf = [c](double x) { return lambda(x - c); };
  v.left_mass = [c](double x) { return gumbel_left_mass(x - c); };
  v.right_mass = [c](double x) { return std::exp(-(x - c)); };
  v.lo_mark = std::min(-2.0, c - 2.0);
  v.hi_mark = std::max(2.0, c + 2.0);
  return v;
}

W1Result w1_distance(const CdfView& f, const MetricsOptions&) {
  const double lo = std::max(f.left, f.lo_mark - kWindowLeft);
  const double hi = f.hi_mark + kWindowRight;
  auto gap = [&](double x) { return f.cdf(x) - lambda(x); };

  std::vector<double> cuts{lo, f.lo_mark, f.hi_mark, hi};
  for (double d = 1.0; d < kWindowLeft; d *= 2.0) {
    if (f.lo_mark - d > lo) cuts.push_back(f.lo_mark - d);
    if (f.hi_mark + d < hi) cuts.push_back(f.hi_mark + d);
  }
  // Sign changes of the gap are kinks of |gap|.
  const int scan = 512;
  const double s0 = std::max(lo, f.lo_mark - 8.0);
  const double s1 = f.hi_mark + 16.0;
  double xp = s0;
  double gp = gap(xp);
  for (int i = 1; i <= scan; ++i) {
    const double x = s0 + (s1 - s0) * i / scan;
    const double g = gap(x);
    if ((gp < 0.0 && g > 0.0) || (gp > 0.0 && g < 0.0)) {
      double a = xp;
      double b = x;
      const bool neg_left = gp < 0.0;
      for (int k = 0; k < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++k) {
        const double m = 0.5 * (a + b);
        ((gap(m) < 0.0) == neg_left ? a : b) = m;
      }
      cuts.push_back(0.5 * (a + b));
    }
    xp = x;
    gp = g;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto q = quad::integrate([&](double x) { return std::abs(gap(x)); }, cuts, 1e-14, 1e-11,
                                 20000);
  // Left of the window F and Lambda are both increasing, so each integral
  // is bounded by (width) * (value at the window edge) or closed forms.
  double left_bound = gumbel_left_mass(lo);
  if (std::isfinite(f.left)) {
    left_bound += (lo - f.left) * f.cdf(lo);
  } else {
    left_bound += f.left_mass(lo);
  }
  const double right_bound = std::exp(-hi) + f.right_mass(hi);

  W1Result r;
  r.value = q.value;
  r.error = q.error + left_bound + right_bound;
  if (!(r.error <= 1e-9 * r.value + 1e-12)) {
    throw CertificationError("w1_distance: error budget not met (error " +
                             std::to_string(r.error) + " for value " + std::to_string(r.value) +
                             ")");
  }
  return r;
}

W1Result w1_distance(const CdfCurve& curve, const MetricsOptions& opt) {
  return w1_distance(curve_view(curve), opt);
}

KsResult ks_distance(const CdfView& f, const MetricsOptions& opt) {
  const int n = std::max(16, opt.ks_grid);
  const double a = std::max(f.left, f.lo_mark - 8.0);
  const double b = f.hi_mark + 10.0;
  const double h = (b - a) / (n - 1);

  std::vector<double> xs(n), fs(n), ls(n);
  for (int i = 0; i < n; ++i) xs[i] = i == n - 1 ? b : a + h * i;
  parallel_for(static_cast<std::size_t>(n), opt.workers, [&](std::size_t i) {
    fs[i] = f.cdf(xs[i]);
    ls[i] = lambda(xs[i]);
  });
  auto absgap = [&](double x) { return std::abs(f.cdf(x) - lambda(x)); };

  KsResult r;
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    const double g = std::abs(fs[i] - ls[i]);
    if (g > r.grid_value) {
      r.grid_value = g;
      r.x_at_sup = xs[i];
    }
    const double gl = i > 0 ? std::abs(fs[i - 1] - ls[i - 1]) : -1.0;
    const double gr = i + 1 < n ? std::abs(fs[i + 1] - ls[i + 1]) : -1.0;
    if (g >= gl && g >= gr && g > 0.0) peaks.push_back(i);
  }
  r.value = r.grid_value;
  std::stable_sort(peaks.begin(), peaks.end(), [&](int p, int q) {
    return std::abs(fs[p] - ls[p]) > std::abs(fs[q] - ls[q]);
  });
  if (peaks.size() > kKsPeaks) peaks.resize(kKsPeaks);

  auto consider = [&](double x, double g) {
    if (g > r.value) {
      r.value = g;
      r.x_at_sup = x;
    }
  };
  for (int p : peaks) {
    const double lo = xs[std::max(0, p - 1)];
    const double hi = xs[std::min(n - 1, p + 1)];
    const auto [x, g] = golden_max(absgap, lo, hi, 1e-9);
    consider(x, g);
  }
  if (f.seed > a && f.seed < b) {
    const auto [x, g] = golden_max(absgap, std::max(a, f.seed - 2 * h), std::min(b, f.seed + 2 * h),
                                   1e-9);
    consider(x, g);
  }

  // Monotone enclosure: on [x0, x1], F - Lambda lies in
  // [F(x0) - Lambda(x1), F(x1) - Lambda(x0)].
  struct Cell {
    double x0, x1, f0, f1, l0, l1;
    double bound() const { return std::max(std::abs(f1 - l0), std::abs(f0 - l1)); }
  };
  double upper = std::max(fs.front(), ls.front());  // (-inf, a]
  upper = std::max(upper, std::max(1.0 - fs.back(), 1.0 - ls.back()));  // [b, inf)
  std::vector<Cell> stack;
  for (int i = n - 2; i >= 0; --i) stack.push_back({xs[i], xs[i + 1], fs[i], fs[i + 1], ls[i], ls[i + 1]});
  int splits = 0;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    const double u = c.bound();
    if (u <= r.value + kKsCertTol || c.x1 - c.x0 < kKsMinCell || splits >= kKsMaxSplits) {
      upper = std::max(upper, u);
      continue;
    }
    const double m = 0.5 * (c.x0 + c.x1);
    const double fm = f.cdf(m);
    const double lm = lambda(m);
    ++splits;
    consider(m, std::abs(fm - lm));
    stack.push_back({m, c.x1, fm, c.f1, lm, c.l1});
    stack.push_back({c.x0, m, c.f0, fm, c.l0, lm});
  }
  r.upper = std::max(upper, r.value);
  return r;
}

KsResult ks_distance(const CdfCurve& curve, const MetricsOptions& opt) {
  return ks_distance(curve_view(curve), opt);
}

double g_profile(const ScalingConstants& c, double x) {
  if (!(x < c.ell2)) throw DomainError("g_profile: need x < ell2");
  return std::exp(-x) + x - 2.0 * std::log(c.ell2 - x);
}

double x_star(const ScalingConstants& c) {
  auto dg = [&](double x) { return 1.0 - std::exp(-x) + 2.0 / (c.ell2 - x); };
  double lo = -2.0 / c.ell2;
  double hi = 0.0;
  if (!(dg(lo) < 0.0 && dg(hi) > 0.0)) {
    throw BracketError("x_star: g' does not change sign on (-2/ell2, 0)");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double m = 0.5 * (lo + hi);
    (dg(m) < 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double predicted_sup_profile(const ScalingConstants& c, double x) {
  if (!(x < c.ell2)) throw DomainError("predicted_sup_profile: need x < ell2");
  const double d = c.ell2 - x;
  return std::exp(-std::exp(-x) - x) * d * d / (2.0 * c.log_s);
}

double predicted_sup_max(const ScalingConstants& c) {
  return std::exp(-g_profile(c, x_star(c))) / (2.0 * c.log_s);
}

DistanceReport scaled_report(const CdfCurve& curve, const MetricsOptions& opt) {
  const auto& c = curve.constants;
  DistanceReport r;
  r.params = curve.params;
  r.engine = curve.engine;
  const auto w = w1_distance(curve, opt);
  const auto k = ks_distance(curve, opt);
  r.w1 = w.value;
  r.w1_err = w.error;
  r.ks = k.value;
  r.ks_upper = k.upper;
  r.x_at_sup = k.x_at_sup;
  const double lls = std::log(c.log_s);
  const double scale = c.log_s / (lls * lls);
  r.scaled_w1 = r.w1 * scale;
  r.scaled_ks = r.ks * scale;
  r.predicted_w1 = 1.0 / (2.0 * scale);
  r.predicted_ks = 1.0 / (2.0 * std::numbers::e * scale);
  r.predicted_sup_max = predicted_sup_max(c);
  r.x_star = x_star(c);
  r.ratio_w1 = r.scaled_w1 / 0.5;
  r.ratio_ks = r.scaled_ks * 2.0 * std::numbers::e;
  return r;
}

}  // namespace chiral
