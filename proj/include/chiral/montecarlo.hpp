#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "chiral/scaling.hpp"

namespace chiral {

enum class SampleSource { matrix, radial };
/// radius_sq: max_k |zeta_k|^2 (same scale as max_j Y_j). x_n: rescaled X_n.
enum class SampleScale { radius_sq, x_n };

std::string_view source_name(SampleSource s);
std::string_view scale_name(SampleScale s);

struct SampleMeta {
  EnsembleParams params;
  SampleSource source = SampleSource::radial;
  SampleScale scale = SampleScale::radius_sq;
  std::uint64_t seed = 0;
  std::int64_t count = 0;
  std::int64_t retries = 0;  ///< matrix draws redone after a solver failure
};

struct SampleBatch {
  std::vector<double> values;
  SampleMeta meta;
};

/// Complex Gaussian entries of P and Q.
enum class EntryVariance {
  half_over_n,    ///< E|entry|^2 = 1/(2n): real and imaginary parts 1/(4n) each
  quarter_over_n  ///< E|entry|^2 = 1/(4n)
};

struct SamplerOptions {
  int workers = 1;
  EntryVariance variance = EntryVariance::half_over_n;
};

/// Largest matrix size accepted by the dense sampler.
inline constexpr std::int64_t kMatrixMaxN = 512;

/// max_k |eigenvalue of Psi^* Phi| with Phi = P + Q, Psi = P - Q, P and Q
/// (n+v) x n. The nonzero eigenvalues of Psi^* Phi are the zeta_k^2.
SampleBatch sample_dirac_spectrum_max(const EnsembleParams& p, std::int64_t count,
                                      std::uint64_t seed, const SamplerOptions& opt = {});

/// max_j Y_j with Y_j = sqrt(G1 G2) / n, G1 ~ Gamma(j), G2 ~ Gamma(j + v).
SampleBatch sample_radial_max(const EnsembleParams& p, std::int64_t count, std::uint64_t seed,
                              const SamplerOptions& opt = {});

struct KsTestResult {
  double statistic = 0;
  double p_value = 1;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the
/// effective size sqrt(ne) + 0.12 + 0.11 / sqrt(ne).
KsTestResult two_sample_ks(const SampleBatch& a, const SampleBatch& b);

/// P(sup |Brownian bridge| > lambda).
double kolmogorov_sf(double lambda);

/// Maps a radius_sq batch to X_n draws through u_n^{-1}(2n m).
SampleBatch empirical_rescale(const SampleBatch& batch);

/// Fraction of values <= x; `sorted` must be ascending.
double empirical_cdf(const std::vector<double>& sorted, double x);

/// Half-width of the (1 - alpha) Dvoretzky-Kiefer-Wolfowitz band.
double dkw_epsilon(std::int64_t count, double alpha = 0.01);

}  // namespace chiral
