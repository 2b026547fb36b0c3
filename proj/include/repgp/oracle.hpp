#pragma once

#include "repgp/gaussian.hpp"

#include <cstdint>

namespace repgp {

/// Self-normalized importance-sampling estimate of exact posterior moments.
struct OracleResult {
  Vector mean;
  Matrix covariance;
  /// Monte-Carlo standard errors of each mean entry and each diagonal
  /// covariance entry.
  Vector mean_se;
  Vector variance_se;
  double effective_sample_size = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

struct OracleOptions {
  long n_samples = 1'000'000;
  std::uint64_t seed = 0;
  /// Samples drawn per independently seeded chunk.
  long chunk_size = 1 << 16;
  int threads = 1;
  double min_ess = 100.0;
};

/// Latent-space moments: proposal f ~ N(0, K), weight prod_i p(y_i | f_i).
OracleResult is_posterior_moments(const Matrix& K, const Vector& y, double eps,
                                  const OracleOptions& opts);

/// Weight-space moments for the linear kernel: w ~ N(0, I_d), f = X w.
OracleResult is_weight_space_moments(const Matrix& X, const Vector& y, double eps,
                                     const OracleOptions& opts);

/// Weighted mean and covariance of the columns of `samples` (dim x n).
/// Both passes are exact two-pass sums in column order.
void weighted_moments(const Matrix& samples, const Vector& weights, Vector& mean, Matrix& cov);

struct MomentError {
  double mse_mean = 0.0;
  double mse_cov = 0.0;
};

MomentError moment_error(const Vector& mean, const Matrix& cov, const OracleResult& oracle);

/// Weight-space posterior N(w | mu, S) implied by Gaussian sites on f = X w
/// under the prior w ~ N(0, I).
void weight_space_posterior(const Matrix& X, const Vector& site_precision,
                            const Vector& site_natural_mean, Vector& mean, Matrix& cov);

}  // namespace repgp
