#pragma once

// Independent reference computations for the unit and acceptance suites.

#include "repgp/gaussian.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace testsupport {

using repgp::Matrix;
using repgp::Vector;

inline double normal_density(double f, double mean, double var) {
  const double d = f - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double step_likelihood(double y, double f, double eps) {
  return y * f >= 0.0 ? 1.0 - eps : eps;
}

/// Integral over the real line of g, split at `split` where the integrand may
/// jump; each half is mapped to a finite window of +-40 sd around `center`.
template <class G>
double integrate_real_line(G g, double center, double sd, double split = 0.0) {
  using boost::math::quadrature::gauss_kronrod;
  const double lo = center - 40.0 * sd;
  const double hi = center + 40.0 * sd;
  double total = 0.0;
  if (split > lo) total += gauss_kronrod<double, 61>::integrate(g, lo, std::min(split, hi), 15, 1e-14);
  if (split < hi) total += gauss_kronrod<double, 61>::integrate(g, std::max(split, lo), hi, 15, 1e-14);
  return total;
}

struct QuadMoments {
  double z;
  double mean;
  double variance;
};

/// Normalizer, mean and variance of p(y|f)^u N(f|h, lambda) by quadrature.
inline QuadMoments tilted_by_quadrature(double h, double lambda, double y, double eps,
                                        double u = 1.0) {
  const double sd = std::sqrt(lambda);
  auto p = [&](double f) { return std::pow(step_likelihood(y, f, eps), u) * normal_density(f, h, lambda); };
  const double z = integrate_real_line(p, h, sd);
  const double m1 = integrate_real_line([&](double f) { return f * p(f); }, h, sd) / z;
  const double m2 = integrate_real_line([&](double f) { return (f - m1) * (f - m1) * p(f); }, h, sd) / z;
  return {z, m1, m2};
}

/// KL(p || N(mean_p, var_p)) where p is the normalized tilted density on
/// cavity N(h, lambda).
inline double tilted_kl_by_quadrature(double h, double lambda, double y, double eps) {
  const QuadMoments mom = tilted_by_quadrature(h, lambda, y, eps);
  const double sd = std::sqrt(lambda);
  auto log_normal = [](double f, double m, double v) {
    return -0.5 * (f - m) * (f - m) / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
  };
  auto integrand = [&](double f) {
    const double t = step_likelihood(y, f, eps);
    if (t <= 0.0) return 0.0;
    const double log_p = std::log(t) + log_normal(f, h, lambda) - std::log(mom.z);
    return std::exp(log_p) * (log_p - log_normal(f, mom.mean, mom.variance));
  };
  return integrate_real_line(integrand, h, sd);
}

inline Matrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix B(n, n + 2);
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) B(i, j) = nd(rng);
  const Matrix A = B * B.transpose() / n + 0.1 * Matrix::Identity(n, n);
  return 0.5 * (A + A.transpose());
}

inline Vector random_labels(int n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = coin(rng) ? 1.0 : -1.0;
  return y;
}

/// (K^-1 + diag(tau))^-1 via full inverses; tau may contain zeros.
inline Matrix posterior_cov_by_inversion(const Matrix& K, const Vector& tau) {
  Matrix P = K.inverse();
  P.diagonal() += tau;
  return P.inverse();
}

}  // namespace testsupport

namespace testsupport {

struct DenseSites {
  Vector precision;
  Vector natural_mean;
};

/// EP with every quantity rebuilt from scratch: A by full inversion before
/// each site, tilted moments by quadrature. Runs exactly `sweeps` sweeps.
inline DenseSites dense_ep(const Matrix& K, const Vector& y, double eps, int sweeps) {
  const auto n = K.rows();
  DenseSites s{Vector::Zero(n), Vector::Zero(n)};
  const Matrix Kinv = K.inverse();
  for (int it = 0; it < sweeps; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Matrix P = Kinv;
      P.diagonal() += s.precision;
      const Matrix A = P.inverse();
      const Vector h = A * s.natural_mean;
      const double lambda = 1.0 / (1.0 / A(i, i) - s.precision[i]);
      const double hc = lambda * (h[i] / A(i, i) - s.natural_mean[i]);
      const QuadMoments q = tilted_by_quadrature(hc, lambda, y[i], eps);
      s.precision[i] = 1.0 / q.variance - 1.0 / lambda;
      s.natural_mean[i] = q.mean / q.variance - hc / lambda;
    }
  }
  return s;
}

}  // namespace testsupport
