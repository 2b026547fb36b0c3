#pragma once

#include "repgp/gaussian.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace repgp {

struct Dataset {
  Matrix X;
  Vector y;
  /// True where the observed label was deliberately flipped.
  std::vector<bool> flipped_mask;
  std::string name;
  /// 1-based file lines dropped because of missing values (CSV only).
  std::vector<long> rejected_lines;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
  long flip_count() const;

  /// Rows selected by `rows`, in that order.
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct SplitPlan {
  long n_train = 0;
  long n_test = 0;
  long n_repeats = 1;
  std::uint64_t seed = 0;
};

/// Mixture geometry for the synthetic nonlinear task.
struct MixtureParams {
  Eigen::Vector2d class1_mean{2.0, 0.0};
  Eigen::Vector2d class2_mean_a{-2.0, 2.0};
  Eigen::Vector2d class2_mean_b{-2.0, -2.0};
  double stddev = 1.0;
};

/// Five 2-D points, separable through the origin except one right-hand point
/// whose label is flipped.
Dataset gen_toy_five_points(std::uint64_t seed);

/// Class +1 from one Gaussian, class -1 from an equal mixture of two; rows
/// shuffled, then floor(flip_rate * N) labels flipped.
Dataset gen_mixture(long n_per_class, double flip_rate, std::uint64_t seed,
                    const MixtureParams& params = {});

struct CsvOptions {
  std::string label_column;
  std::string positive_label;
  bool standardize = true;
};

Dataset load_csv(const std::string& path, const CsvOptions& opts);

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitPlan& plan, long repeat_index);

/// One line per repeat of whitespace-separated zero-based train indices.
std::vector<std::vector<Eigen::Index>> load_split_indices(const std::string& path);

/// Train = listed rows; test = every other row in index order.
std::pair<Dataset, Dataset> split_from_indices(const Dataset& ds,
                                               const std::vector<Eigen::Index>& train_rows);

Dataset flip_labels(const Dataset& ds, double rate, std::uint64_t seed);

/// Column-wise standardization to zero mean and unit variance; constant
/// columns are only centered.
void standardize_columns(Matrix& X);

}  // namespace repgp
