#pragma once

#include <cstdint>

namespace chiral {

/// One instance of the tau = 0 chiral ensemble: 2n + v dimensional Dirac
/// matrix built from two (n + v) x n Gaussian blocks.
struct EnsembleParams {
  std::int64_t n = 1;
  std::int64_t v = 0;

  /// Throws DomainError unless n >= 1 and v >= 0.
  void validate() const;
};

/// s_n = n (n + v) / (2n + v).
double s_of(const EnsembleParams& p);

/// Smallest n with s_n > e at this v.
std::int64_t min_admissible_n(std::int64_t v);

struct ScalingConstants {
  double s = 0;
  double log_s = 0;
  double a = 0;      ///< a(s_n)
  double b = 0;      ///< b(s_n) = 1 / sqrt(log s_n)
  double alpha = 0;  ///< a / b
  double ell1 = 0;   ///< log(2 log log s_n)
  double ell2 = 0;   ///< log(sqrt(2 pi) log s_n)
  /// -x0_left is the root of u_n(x) = 0, the left end of the support of X_n.
  double x0_left = 0;
  /// log s_n + 2 sqrt(s_n log s_n), the leading-order form of x0_left.
  double x0_closed = 0;
  /// ell1 is only reported when log log s_n > 1/2.
  bool ell1_applicable = false;

  // Pieces of u_n kept so that u_n never recomputes square roots of n.
  double center = 0;  ///< 2 sqrt(n (n + v))
  double width = 0;   ///< sqrt(2n + v)
};

/// a(y) = sqrt(log y) - log(sqrt(2 pi) log y) / sqrt(log y), y > e.
double a_of(double y);

/// Throws AdmissibilityError when s_n <= e.
ScalingConstants scaling_constants(const EnsembleParams& p);

/// u_n(x) = 2 sqrt(n (n + v)) + sqrt(2n + v) (a + b x), on the 2nY scale.
double u_n(const ScalingConstants& c, double x);

/// Inverse of u_n: the X_n value of a threshold t on the 2nY scale.
double x_of_u(const ScalingConstants& c, double t);

/// w~(k, x) = k / sqrt(s_n) + a + b x.
double w_tilde(const ScalingConstants& c, double k, double x);

}  // namespace chiral
