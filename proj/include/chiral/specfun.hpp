#pragma once

// Special functions used by the radial laws and the Gumbel comparisons.
//
// Everything here works in double precision. Functions whose values leave
// the double range for the arguments we care about (K_v for large v and
// small x, Gamma for large arguments) come in a log-space flavour; the
// linear versions throw OverflowError instead of saturating.

namespace chiral::specfun {

/// Tolerances attached to an engine or evaluation.
struct Accuracy {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;

  /// Throws DomainError unless 0 < rel_tol <= 1 and abs_tol >= 0.
  void validate() const;
};

// --- Bessel K ---------------------------------------------------------------

/// e^x K_v(x) for v >= 0, x > 0.
double bessel_k_scaled(double v, double x);

/// log(e^x K_v(x)); finite wherever the arguments are.
double log_bessel_k_scaled(double v, double x);

/// K_v(v x) from the uniform large-order (Debye) expansion, v >= 20.
/// `terms` selects how many correction polynomials u_1..u_terms are kept
/// (0 gives the bare leading-order formula, at most 4).
double bessel_k_uniform(double v, double x, int terms = 4);
double log_bessel_k_uniform(double v, double x, int terms = 4);

/// Order at which bessel_k_uniform becomes available.
inline constexpr double kUniformMinOrder = 20.0;

// --- Gamma family -----------------------------------------------------------

/// log Gamma(z), z > 0.
double log_gamma(double z);

/// lgamma(a + 1) - [(a + 1/2) log a - a + log sqrt(2 pi)] for a >= 10,
/// i.e. the Stirling series remainder, computed without cancellation.
double stirling_correction(double a);

/// log(1 + s) - s with full relative accuracy near s = 0.
double log1pmx(double s);

/// Lower and upper regularized incomplete gamma, each computed so that the
/// smaller one carries full relative accuracy.
struct GammaSplit {
  double p;  ///< P(a, x) = P(Gamma(a) <= x)
  double q;  ///< Q(a, x) = P(Gamma(a) > x)
};

GammaSplit reg_gamma(double a, double x);
double reg_gamma_q(double a, double x);
double reg_gamma_p(double a, double x);

/// reg_gamma(a, a + d) with d passed separately, so that for huge a the
/// standardized distance d / sqrt(a) does not lose digits to rounding of
/// a + d.
GammaSplit reg_gamma_offset(double a, double d);

/// Shape at and above which reg_gamma switches to the uniform
/// (Temme) asymptotic expansion.
inline constexpr double kGammaUniformMinShape = 1.0e4;

// --- Normal / Gumbel --------------------------------------------------------

/// 1 - Phi(t).
double normal_sf(double t);

/// (1 / (sqrt(2 pi) t)) e^{-t^2/2}, the leading Mills-ratio term; t > 0.
double mills_approx(double t);

double gumbel_cdf(double x);
double gumbel_pdf(double x);

/// log(1 - p) for p in [0, 1], accurate for tiny p.
double log1m(double p);

}  // namespace chiral::specfun
