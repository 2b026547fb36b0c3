#pragma once

#include "repgp/gaussian.hpp"

namespace repgp {

enum class KernelKind { Linear, Rbf };

/// Covariance function plus diagonal jitter.
///
/// Rbf uses the lengthscale convention exp(-|x - x'|^2 / (2 width^2)).
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double width = 1.0;
  double jitter = 1e-8;

  static KernelSpec linear(double jitter = 1e-10) { return {KernelKind::Linear, 1.0, jitter}; }
  static KernelSpec rbf(double width, double jitter = 1e-8) { return {KernelKind::Rbf, width, jitter}; }
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x1,
                   const Eigen::Ref<const Vector>& x2);

/// N x N Gram matrix of the rows of X, jitter added on the diagonal.
Matrix gram(const KernelSpec& spec, const Matrix& X);

/// N x M matrix of kernel values between rows of X and rows of Xstar (no jitter).
Matrix cross_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Xstar);

/// Median of the pairwise Euclidean distances between rows of X.
double median_pairwise_distance(const Matrix& X);

}  // namespace repgp
