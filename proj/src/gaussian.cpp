#include "repgp/gaussian.hpp"

#include "repgp/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace repgp {

Gaussian1D gaussian_multiply(const Gaussian1D& a, const Gaussian1D& b) {
  return {a.precision + b.precision, a.natural_mean + b.natural_mean};
}

Gaussian1D gaussian_divide(const Gaussian1D& a, const Gaussian1D& b) {
  return {a.precision - b.precision, a.natural_mean - b.natural_mean};
}

double std_normal_pdf(double x) {
  return std::numbers::inv_sqrtpi / std::numbers::sqrt2 * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Asymptotic series of cdf(x) * sqrt(2 pi) * (-x) * exp(x^2/2) for x << 0.
double lower_tail_series(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= -(2.0 * k - 1.0) * inv_x2;
    sum += term;
  }
  return sum;
}

constexpr double kTailSwitch = -30.0;

}  // namespace

double std_normal_log_cdf(double x) {
  if (x > kTailSwitch) return std::log(std_normal_cdf(x));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(lower_tail_series(x));
}

double inverse_mills_ratio(double x) {
  if (x > kTailSwitch) return std_normal_pdf(x) / std_normal_cdf(x);
  return -x / lower_tail_series(x);
}

PosteriorState PosteriorState::from_prior(const Matrix& K) {
  const auto n = K.rows();
  PosteriorState s;
  s.cov = K;
  s.mean = Vector::Zero(n);
  s.site_m = Vector::Zero(n);
  s.site_precision = Vector::Zero(n);
  s.relax_b = Vector::Zero(n);
  return s;
}

namespace {

Vector column_of(const PosteriorState& state, Eigen::Index idx, bool lower_only) {
  if (!lower_only) return state.cov.col(idx);
  const auto n = state.cov.rows();
  Vector c(n);
  c.head(idx) = state.cov.row(idx).head(idx).transpose();
  c.tail(n - idx) = state.cov.col(idx).tail(n - idx);
  return c;
}

void apply_rank_one(PosteriorState& state, std::size_t i, double new_precision,
                    const Vector& column, const RankOneOptions& opts) {
  const auto n = static_cast<std::size_t>(state.cov.rows());
  const auto idx = static_cast<Eigen::Index>(i);
  const double change = new_precision - state.site_precision[idx];
  if (change == 0.0) return;

  // delta = 1 / change; A <- A - a a^T / (delta + A_ii), written in a form that
  // stays finite as change -> 0.
  const double a_ii = column[idx];
  const double denom = 1.0 + change * a_ii;
  const double floor = opts.singular_floor * state.cov.trace() / static_cast<double>(n);
  if (!(std::abs(denom) >= floor * std::abs(change))) {
    throw Error(ErrorKind::SingularUpdate, "site " + std::to_string(i) + ": delta + A_ii ~ 0");
  }
  if (opts.lower_only) {
    state.cov.selfadjointView<Eigen::Lower>().rankUpdate(column, -change / denom);
  } else {
    state.cov.noalias() -= (change / denom) * column * column.transpose();
  }
  state.site_precision[idx] = new_precision;
}

}  // namespace

void rank_one_update(PosteriorState& state, std::size_t i, double new_precision,
                     const RankOneOptions& opts) {
  if (i >= state.size()) {
    throw Error(ErrorKind::DimensionMismatch, "site index " + std::to_string(i) + " out of range");
  }
  const auto idx = static_cast<Eigen::Index>(i);
  apply_rank_one(state, i, new_precision, column_of(state, idx, opts.lower_only), opts);
}

void update_site(PosteriorState& state, std::size_t i, double new_mean, double new_precision,
                 const RankOneOptions& opts) {
  if (i >= state.size()) {
    throw Error(ErrorKind::DimensionMismatch, "site index " + std::to_string(i) + " out of range");
  }
  const auto idx = static_cast<Eigen::Index>(i);
  const double old_natural = state.site_precision[idx] * state.site_m[idx];
  const double new_natural = new_precision * new_mean;
  const double change = new_precision - state.site_precision[idx];
  const Vector column = column_of(state, idx, opts.lower_only);
  const double a_ii = column[idx];
  const double h_i = state.mean[idx];
  apply_rank_one(state, i, new_precision, column, opts);
  state.site_m[idx] = new_mean;

  // h' = A' nu' with A' = A - k a a^T, so h' = h - k a h_i + A'_i (nu'_i - nu_i)
  const double k = change == 0.0 ? 0.0 : change / (1.0 + change * a_ii);
  const double scale = (1.0 - k * a_ii) * (new_natural - old_natural) - k * h_i;
  state.mean.noalias() += scale * column;
}

}  // namespace repgp
