#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

#include "chiral/radial.hpp"
#include "chiral/scaling.hpp"

namespace chiral {

/// F_n(x) = P(X_n <= x) = prod_j P(2nY_j <= u_n(x)).
///
/// Only the top j_n indices (j = n, n-1, ..., n-j_n+1) are summed in log
/// space; the rest are bounded by (n - j_n) * |log P(2nY_{n-j_n} <= u)|,
/// which dominates each neglected term by stochastic monotonicity in j.
struct CdfCurve {
  EnsembleParams params;
  ScalingConstants constants;
  Engine engine = Engine::gamma_approx;
  double trunc_eps = 1e-12;
  /// Largest j_n used by any evaluation so far.
  std::shared_ptr<std::atomic<std::int64_t>> j_n_used =
      std::make_shared<std::atomic<std::int64_t>>(0);
};

/// exact_bessel if 2n + v <= 5e4, else gamma_approx if v <= 64, else large_v.
Engine auto_engine(const EnsembleParams& p);

/// Builds a curve; throws AdmissibilityError if s_n <= e or the engine is
/// not allowed for these parameters.
CdfCurve make_curve(const EnsembleParams& p, std::optional<Engine> engine = std::nullopt,
                    double trunc_eps = 1e-12);

struct EvalPoint {
  double x = 0;
  double cdf = 0;
  double log_cdf = 0;
  /// Certified bound on |log F_n - log of the truncated product|. When the
  /// truncated product already underflows (cdf = 0 in double) the value is
  /// instead a bound on the absolute error of cdf.
  double trunc_bound = 0;
  /// Estimated error of the summation itself (nonzero only when the sum
  /// over indices is done by Euler-Maclaurin).
  double sum_error = 0;
  std::int64_t terms_used = 0;
};

EvalPoint cdf(const CdfCurve& curve, double x);

/// The n-term product with no truncation (reference; cost linear in n).
double cdf_full_product(const CdfCurve& curve, double x);

/// Smallest x with F_n(x) >= p, to |F_n(x) - p| <= 1e-10.
double quantile(const CdfCurve& curve, double p);

/// F_n(x) - e^{-e^{-x}}.
double gumbel_gap(const CdfCurve& curve, double x);

/// Above this many indices the gamma engine sums by Euler-Maclaurin.
inline constexpr std::int64_t kDirectSumMax = 4096;

}  // namespace chiral
