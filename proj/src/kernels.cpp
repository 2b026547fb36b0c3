#include "repgp/kernels.hpp"

#include "repgp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace repgp {

namespace {

void check_dims(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "input dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x1,
                   const Eigen::Ref<const Vector>& x2) {
  check_dims(x1.size(), x2.size());
  switch (spec.kind) {
    case KernelKind::Linear:
      return x1.dot(x2);
    case KernelKind::Rbf:
      return std::exp(-(x1 - x2).squaredNorm() / (2.0 * spec.width * spec.width));
  }
  return 0.0;
}

Matrix gram(const KernelSpec& spec, const Matrix& X) {
  const auto n = X.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = kernel_eval(spec, X.row(i).transpose(), X.row(j).transpose());
      K(i, j) = k;
      K(j, i) = k;
    }
    K(i, i) += spec.jitter;
  }
  return K;
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& X, const Matrix& Xstar) {
  if (Xstar.rows() > 0) check_dims(X.cols(), Xstar.cols());
  Matrix out(X.rows(), Xstar.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Xstar.rows(); ++j) {
      out(i, j) = kernel_eval(spec, X.row(i).transpose(), Xstar.row(j).transpose());
    }
  }
  return out;
}

double median_pairwise_distance(const Matrix& X) {
  std::vector<double> d;
  const auto n = X.rows();
  if (n < 2) return 1.0;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) d.push_back((X.row(i) - X.row(j)).norm());
  }
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

}  // namespace repgp
