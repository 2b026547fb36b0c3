#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace repgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One-dimensional Gaussian factor in natural parameters.
///
/// Site factors are unnormalized and may carry zero or negative precision;
/// precision == 0 with natural_mean == 0 is the unit factor. mean() and
/// variance() are only meaningful when precision > 0.
struct Gaussian1D {
  double precision = 0.0;
  double natural_mean = 0.0;

  static Gaussian1D from_moments(double mean, double variance) {
    return {1.0 / variance, mean / variance};
  }

  double mean() const { return natural_mean / precision; }
  double variance() const { return 1.0 / precision; }
  bool normalizable() const { return precision > 0.0; }

  friend bool operator==(const Gaussian1D&, const Gaussian1D&) = default;
};

Gaussian1D gaussian_multiply(const Gaussian1D& a, const Gaussian1D& b);
Gaussian1D gaussian_divide(const Gaussian1D& a, const Gaussian1D& b);

double std_normal_pdf(double x);
double std_normal_cdf(double x);
/// log of the standard normal cdf, accurate deep into the lower tail.
double std_normal_log_cdf(double x);
/// pdf(x) / cdf(x), stable for large negative x.
double inverse_mills_ratio(double x);

/// Full state of one inference run over N latent values.
///
/// `cov` is the posterior covariance A of the latent vector, `mean` its
/// posterior mean h. Sites are stored as (mean m_i, precision 1/v_i) so the
/// uninformative initial site v_i = inf is exactly precision 0.
struct PosteriorState {
  Matrix cov;
  Vector mean;
  Vector site_m;
  Vector site_precision;
  Vector relax_b;

  /// Prior state: A = K, h = 0, all sites uninformative, no relaxation.
  static PosteriorState from_prior(const Matrix& K);

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }

  Gaussian1D site(std::size_t i) const {
    return {site_precision[i], site_precision[i] * site_m[i]};
  }

  /// Per-site natural means m_j / v_j.
  Vector site_natural_means() const { return site_precision.cwiseProduct(site_m); }

  /// Recomputes h = A * (m ./ v).
  void refresh_mean() { mean.noalias() = cov * site_natural_means(); }
};

struct RankOneOptions {
  /// Relative floor on |delta + A_ii|; scaled by trace(A)/N.
  double singular_floor = 1e-12;
  /// Touch only the lower triangle of A. The caller restores symmetry, e.g.
  /// A.triangularView<StrictlyUpper>() = A.transpose().
  bool lower_only = false;
};

/// Replaces site i's precision with `new_precision` and applies the matching
/// rank-one correction to A. Leaves site means and h untouched; callers set
/// site_m[i] and call refresh_mean().
///
/// Throws SingularUpdate when |delta + A_ii| falls below the scale-aware floor.
void rank_one_update(PosteriorState& state, std::size_t i, double new_precision,
                     const RankOneOptions& opts = {});

/// Sets site i to (new_mean, new_precision) and updates A and h in O(N^2)
/// and O(N). h accumulates round-off; refresh_mean() once per sweep.
void update_site(PosteriorState& state, std::size_t i, double new_mean, double new_precision,
                 const RankOneOptions& opts = {});

}  // namespace repgp
