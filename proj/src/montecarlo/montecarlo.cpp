#include "chiral/montecarlo.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <mutex>
#include <string>

#include "chiral/errors.hpp"
#include "chiral/parallel.hpp"
#include "chiral/rng.hpp"

// Only present when LAPACK resolves to OpenBLAS.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace chiral {
namespace {

void single_threaded_blas() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (openblas_set_num_threads != nullptr) openblas_set_num_threads(1);
  });
}

using Matrix = Eigen::MatrixXcd;

void check_count(std::int64_t count) {
  if (count < 1) throw DomainError("sampler: need count >= 1");
}

Matrix gaussian_block(Philox4x32& rng, Eigen::Index rows, Eigen::Index cols, double sd) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      m(r, c) = {re, im};
    }
  }
  return m;
}

// Returns a negative value when the eigensolver does not converge.
double matrix_draw(const EnsembleParams& p, std::uint64_t seed, std::uint64_t index,
                   std::uint32_t tag, double sd) {
  Philox4x32 rng(seed, index, tag);
  const auto rows = static_cast<Eigen::Index>(p.n + p.v);
  const auto cols = static_cast<Eigen::Index>(p.n);
  const Matrix P = gaussian_block(rng, rows, cols, sd);
  const Matrix Q = gaussian_block(rng, rows, cols, sd);
  Matrix m = (P - Q).adjoint() * (P + Q);
  Eigen::VectorXcd w(cols);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(cols),
      reinterpret_cast<lapack_complex_double*>(m.data()), static_cast<lapack_int>(cols),
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) return -1.0;
  return w.cwiseAbs().maxCoeff();
}

}  // namespace

std::string_view source_name(SampleSource s) {
  return s == SampleSource::matrix ? "matrix" : "radial";
}

std::string_view scale_name(SampleScale s) {
  return s == SampleScale::radius_sq ? "radius_sq" : "x_n";
}

SampleBatch sample_dirac_spectrum_max(const EnsembleParams& p, std::int64_t count,
                                      std::uint64_t seed, const SamplerOptions& opt) {
  p.validate();
  check_count(count);
  if (p.n > kMatrixMaxN) {
    throw FeasibilityError("matrix sampler limited to n <= " + std::to_string(kMatrixMaxN));
  }
  const double mean_sq = opt.variance == EntryVariance::half_over_n ? 0.5 : 0.25;
  const double sd = std::sqrt(mean_sq / (2.0 * static_cast<double>(p.n)));
  single_threaded_blas();

  SampleBatch b;
  b.meta = {p, SampleSource::matrix, SampleScale::radius_sq, seed, count, 0};
  b.values.resize(static_cast<std::size_t>(count));
  std::vector<char> retried(b.values.size(), 0);
  parallel_for(b.values.size(), opt.workers, [&](std::size_t i) {
    double r = matrix_draw(p, seed, i, kTagMatrix, sd);
    if (r < 0.0) {
      retried[i] = 1;
      r = matrix_draw(p, seed, i, kTagMatrix + kTagRetry, sd);
      if (r < 0.0) {
        throw SampleError("matrix draw " + std::to_string(i) +
                          ": eigensolver did not converge after one retry");
      }
    }
    b.values[i] = r;
  });
  b.meta.retries = std::count(retried.begin(), retried.end(), 1);
  return b;
}

SampleBatch sample_radial_max(const EnsembleParams& p, std::int64_t count, std::uint64_t seed,
                              const SamplerOptions& opt) {
  p.validate();
  check_count(count);
  const double n = static_cast<double>(p.n);
  const double v = static_cast<double>(p.v);
  SampleBatch b;
  b.meta = {p, SampleSource::radial, SampleScale::radius_sq, seed, count, 0};
  b.values.resize(static_cast<std::size_t>(count));
  parallel_for(b.values.size(), opt.workers, [&](std::size_t i) {
    Philox4x32 rng(seed, i, kTagRadialMax);
    double best = 0.0;
    for (std::int64_t j = 1; j <= p.n; ++j) {
      const double jd = static_cast<double>(j);
      std::gamma_distribution<double> g1(jd, 1.0);
      std::gamma_distribution<double> g2(jd + v, 1.0);
      const double a = g1(rng);
      const double c = g2(rng);
      best = std::max(best, a * c);
    }
    b.values[i] = std::sqrt(best) / n;
  });
  return b;
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // 1 - (sqrt(2 pi) / lambda) sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 8; ++k) s += std::exp(-(2 * k - 1) * (2 * k - 1) * w);
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1) ? t : -t;
    if (t < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsTestResult two_sample_ks(const SampleBatch& a, const SampleBatch& b) {
  const auto n1 = static_cast<std::int64_t>(a.values.size());
  const auto n2 = static_cast<std::int64_t>(b.values.size());
  if (n1 < 25 || n2 < 25) {
    throw SampleError("two_sample_ks: need at least 25 values per batch (got " +
                      std::to_string(n1) + " and " + std::to_string(n2) + ")");
  }
  if (a.meta.scale != b.meta.scale) throw SampleError("two_sample_ks: batches on different scales");
  std::vector<double> x = a.values;
  std::vector<double> y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  KsTestResult r;
  r.statistic = d;
  r.n1 = n1;
  r.n2 = n2;
  const double ne = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
  const double se = std::sqrt(ne);
  r.p_value = kolmogorov_sf((se + 0.12 + 0.11 / se) * d);
  return r;
}

SampleBatch empirical_rescale(const SampleBatch& batch) {
  if (batch.meta.scale != SampleScale::radius_sq) {
    throw SampleError("empirical_rescale: batch is already on the X_n scale");
  }
  const auto c = scaling_constants(batch.meta.params);
  const double two_n = 2.0 * static_cast<double>(batch.meta.params.n);
  SampleBatch out;
  out.meta = batch.meta;
  out.meta.scale = SampleScale::x_n;
  out.values.reserve(batch.values.size());
  for (double m : batch.values) out.values.push_back(x_of_u(c, two_n * m));
  return out;
}

double empirical_cdf(const std::vector<double>& sorted, double x) {
  if (sorted.empty()) throw SampleError("empirical_cdf: empty sample");
  const auto k = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
  return static_cast<double>(k) / static_cast<double>(sorted.size());
}

double dkw_epsilon(std::int64_t count, double alpha) {
  if (count < 1 || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("dkw_epsilon: need count >= 1 and 0 < alpha < 1");
  }
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(count)));
}

}  // namespace chiral
