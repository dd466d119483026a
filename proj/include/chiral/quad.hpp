#pragma once

// Globally adaptive Gauss-Kronrod (G15/K31) quadrature.
//
// Nodes and weights come from Boost.Math; the driver keeps a heap of
// panels and bisects the one with the largest error until the total error
// estimate meets the tolerance. Boost's own recursive driver compares an
// unscaled panel error against a scaled tolerance, which makes it recurse
// to full depth on short panels.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace chiral::quad {

struct Result {
  double value = 0;
  double error = 0;
  int panels = 0;
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk31(F& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 31>;
  using G = boost::math::quadrature::gauss<double, 15>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double f0 = f(c);
  double k = f0 * wk[0];
  double g = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = f(c + h * x[i]) + f(c - h * x[i]);
    k += s * wk[i];
    if (i % 2 == 0) g += s * wg[i / 2];
  }
  const double err = std::max(std::abs(k - g), 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k));
  return {a, b, h * k, std::abs(h) * err};
}

/// Integrate f over the consecutive panels given by `cuts` (at least two
/// points, increasing). Stops when error <= max(abs_tol, rel_tol |value|)
/// or after max_panels panels.
template <class F>
Result integrate(F&& f, const std::vector<double>& cuts, double abs_tol, double rel_tol,
                 int max_panels = 4000) {
  std::priority_queue<Panel> heap;
  Result r;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    Panel p = gk31(f, cuts[i], cuts[i + 1]);
    r.value += p.value;
    r.error += p.error;
    heap.push(p);
  }
  r.panels = static_cast<int>(heap.size());
  while (!heap.empty() && r.error > std::max(abs_tol, rel_tol * std::abs(r.value)) &&
         r.panels < max_panels) {
    const Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    heap.pop();
    const Panel l = gk31(f, p.a, mid);
    const Panel u = gk31(f, mid, p.b);
    r.value += l.value + u.value - p.value;
    r.error += l.error + u.error - p.error;
    heap.push(l);
    heap.push(u);
    ++r.panels;
  }
  // Recompute the sums to shed accumulated cancellation from the updates.
  r.value = 0;
  r.error = 0;
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    heap.pop();
  }
  return r;
}

template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 4000) {
  return integrate(f, std::vector<double>{a, b}, abs_tol, rel_tol, max_panels);
}

}  // namespace chiral::quad
