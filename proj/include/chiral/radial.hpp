#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chiral/scaling.hpp"
#include "chiral/specfun.hpp"

namespace chiral {

/// Tail engines for the law of 2nY_j.
enum class Engine { exact_bessel, gamma_approx, large_v };

std::string_view engine_name(Engine e);
/// Accepts "exact_bessel"/"exact", "gamma_approx"/"gamma", "large_v".
Engine parse_engine(std::string_view s);

/// Above this v the gamma surrogate is refused.
inline constexpr std::int64_t kVGammaMax = 64;
/// Smallest v accepted by the large-v engine.
inline constexpr std::int64_t kLargeVMin = 20;
/// Feasibility bounds of exact quadrature.
inline constexpr std::int64_t kExactMaxJ = 10000;
inline constexpr std::int64_t kExactMaxOrder = 50000;  // 2j + v
/// Bound for the gamma-product oracle.
inline constexpr std::int64_t kOracleMaxJ = 500;

/// The law of 2nY_j for one index j. On the 2nY scale the density is
/// t^{2j+v-1} K_v(t) / Z_j and does not depend on n.
struct RadialLaw {
  EnsembleParams params;
  std::int64_t j = 1;
  Engine engine = Engine::exact_bessel;
  specfun::Accuracy accuracy;

  /// Index range and engine admissibility.
  void validate() const;
};

/// P(2nY_j <= t) and P(2nY_j > t); whichever is smaller carries full
/// relative accuracy, the other is its complement.
struct TailSplit {
  double le = 0;
  double gt = 1;
};

/// log Z_j, Z_j = int_0^inf y^{2j+v-1} K_v(y) dy
///             = sqrt(pi) Gamma(2j+2v) Gamma(j) / (2^{v+1} Gamma(j+v+1/2)).
double log_norm_const(const EnsembleParams& p, std::int64_t j);

/// Quadrature of the normalized density (log-space Gauss-Kronrod).
TailSplit split_exact(const RadialLaw& law, double t);
double tail_exact(const RadialLaw& law, double t);

/// Q(2j + v - 1/2, t).
TailSplit split_gamma(const RadialLaw& law, double t);
double tail_gamma(const RadialLaw& law, double t);

/// P(G1 G2 > t^2 / 4), G1 ~ Gamma(j), G2 ~ Gamma(j + v).
TailSplit split_product_gamma_oracle(const RadialLaw& law, double t);
double tail_product_gamma_oracle(const RadialLaw& law, double t);

struct LargeVGeometry {
  double mu_j = 0;
  double tau_at_mu = 0;
  double tau_prime_at_mu = 0;
  double beta_j = 0;
};

LargeVGeometry large_v_geometry(const EnsembleParams& p, std::int64_t j);

/// tau_j(y) = sqrt(1+y^2) - log(1+sqrt(1+y^2)) + log(1+y^2)/(4v) - (2j-1) log(y)/v.
double tau_j(const EnsembleParams& p, std::int64_t j, double y);

/// v (tau_j(mu + d) - tau_j(mu)) without forming the two large values.
double v_tau_delta(const EnsembleParams& p, std::int64_t j, double mu, double d);

enum class LargeVCoefficient {
  rewritten,    ///< v / sqrt(2 pi (2j+v)) e^{v tau_j(mu_j)}
  exact_gamma,  ///< the Gamma-function prefactor before Stirling
};

struct LargeVDetail {
  TailSplit split;
  double z_lo = 0;
  double remainder_bound = 0;  ///< analytic bound on the neglected right tail
  bool clamped = false;
};

LargeVDetail tail_large_v_detail(const RadialLaw& law, double t,
                                 LargeVCoefficient coef = LargeVCoefficient::rewritten);
TailSplit split_large_v(const RadialLaw& law, double t);
double tail_large_v(const RadialLaw& law, double t);

/// Number of large-v evaluations whose raw value left [0, 1] and was clamped.
std::uint64_t large_v_clamp_events();

/// Dispatch on law.engine.
TailSplit tail_split(const RadialLaw& law, double t);

/// Draws of 2nY_j = 2 sqrt(G1 G2). Draw i depends only on (seed, i).
std::vector<double> sample_radial(const RadialLaw& law, std::int64_t count, std::uint64_t seed);

}  // namespace chiral
