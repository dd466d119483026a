#pragma once

#include <functional>
#include <limits>

#include "chiral/maxdist.hpp"

namespace chiral {

/// A distribution function as seen by the distance routines. F_n curves
/// and shifted Gumbel laws (for self-tests) both fit this shape.
struct CdfView {
  std::function<double(double)> cdf;
  /// F = 0 on (-inf, left]; -inf if the support is unbounded.
  double left = -std::numeric_limits<double>::infinity();
  /// Window landmarks, -ell1 and ell2 for F_n curves.
  double lo_mark = -2.0;
  double hi_mark = 2.0;
  /// Bound on int_{-inf}^{X} F, used when `left` is -inf.
  std::function<double(double)> left_mass;
  /// Bound on int_X^{inf} (1 - F).
  std::function<double(double)> right_mass;
  /// Point at which the sup search is additionally seeded.
  double seed = 0.0;
};

CdfView curve_view(const CdfCurve& curve);

/// x -> e^{-e^{-(x - c)}}.
CdfView shifted_gumbel_view(double c);

struct W1Result {
  double value = 0;
  double error = 0;  ///< quadrature error plus both analytic tail bounds
};

struct KsResult {
  double value = 0;
  double x_at_sup = 0;
  double grid_value = 0;  ///< sup over the grid points alone
  /// Rigorous upper bound on the true sup from monotone cell enclosures.
  double upper = 0;
};

struct MetricsOptions {
  int workers = 1;
  int ks_grid = 4096;
};

/// int |F - Lambda| dx. Throws CertificationError when the error budget
/// 1e-9 * value + 1e-12 is not met.
W1Result w1_distance(const CdfView& f, const MetricsOptions& opt = {});
W1Result w1_distance(const CdfCurve& curve, const MetricsOptions& opt = {});

KsResult ks_distance(const CdfView& f, const MetricsOptions& opt = {});
KsResult ks_distance(const CdfCurve& curve, const MetricsOptions& opt = {});

/// g(x) = e^{-x} + x - 2 log(ell2 - x).
double g_profile(const ScalingConstants& c, double x);

/// Root of g'(x) = 1 - e^{-x} + 2 / (ell2 - x) in (-2/ell2, 0).
double x_star(const ScalingConstants& c);

/// e^{-e^{-x} - x} (ell2 - x)^2 / (2 log s_n), x < ell2.
double predicted_sup_profile(const ScalingConstants& c, double x);

/// max_x predicted_sup_profile = e^{-g(x_star)} / (2 log s_n).
double predicted_sup_max(const ScalingConstants& c);

struct DistanceReport {
  EnsembleParams params;
  Engine engine = Engine::gamma_approx;
  double w1 = 0;
  double w1_err = 0;
  double ks = 0;
  double ks_upper = 0;
  double x_at_sup = 0;
  double scaled_w1 = 0;     ///< w1 log s_n / (log log s_n)^2
  double scaled_ks = 0;     ///< ks log s_n / (log log s_n)^2
  double predicted_w1 = 0;  ///< (log log s_n)^2 / (2 log s_n)
  double predicted_ks = 0;  ///< (log log s_n)^2 / (2e log s_n)
  double predicted_sup_max = 0;
  double x_star = 0;
  double ratio_w1 = 0;  ///< scaled_w1 / (1/2)
  double ratio_ks = 0;  ///< scaled_ks / (1/(2e))
};

DistanceReport scaled_report(const CdfCurve& curve, const MetricsOptions& opt = {});

}  // namespace chiral
