#include "repgp/data.hpp"

#include "repgp/error.hpp"
#include "repgp/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace repgp {

long Dataset::flip_count() const {
  return static_cast<long>(std::count(flipped_mask.begin(), flipped_mask.end(), true));
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.name = name;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.flipped_mask.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    const auto kk = static_cast<Eigen::Index>(k);
    out.X.row(kk) = X.row(r);
    out.y[kk] = y[r];
    out.flipped_mask[k] = flipped_mask[static_cast<std::size_t>(r)];
  }
  return out;
}

Dataset gen_toy_five_points(std::uint64_t seed) {
  // Two points per class on either side of the vertical axis, plus a point
  // far to the right that belongs to class +1 but is observed as -1.
  static const double base[5][2] = {{-2.0, 1.0}, {-1.5, -1.0}, {1.5, 0.5}, {2.0, -1.0}, {4.0, 0.2}};
  static const double clean[5] = {-1.0, -1.0, 1.0, 1.0, 1.0};
  std::mt19937_64 rng(derive_seed(seed, {0x70u}));
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);

  Dataset ds;
  ds.name = "toy5";
  ds.X.resize(5, 2);
  ds.y.resize(5);
  ds.flipped_mask.assign(5, false);
  for (int i = 0; i < 5; ++i) {
    ds.X(i, 0) = base[i][0] + jitter(rng);
    ds.X(i, 1) = base[i][1] + jitter(rng);
    ds.y[i] = clean[i];
  }
  ds.y[4] = -ds.y[4];
  ds.flipped_mask[4] = true;
  return ds;
}

Dataset gen_mixture(long n_per_class, double flip_rate, std::uint64_t seed,
                    const MixtureParams& params) {
  if (n_per_class < 1) throw Error(ErrorKind::InvalidConfig, "n_per_class must be >= 1");
  std::mt19937_64 rng(derive_seed(seed, {0x31u}));
  std::normal_distribution<double> normal;
  std::bernoulli_distribution pick_a(0.5);

  const long n = 2 * n_per_class;
  Dataset ds;
  ds.name = "mixture";
  ds.X.resize(n, 2);
  ds.y.resize(n);
  ds.flipped_mask.assign(static_cast<std::size_t>(n), false);
  for (long i = 0; i < n; ++i) {
    Eigen::Vector2d center;
    if (i < n_per_class) {
      center = params.class1_mean;
      ds.y[i] = 1.0;
    } else {
      center = pick_a(rng) ? params.class2_mean_a : params.class2_mean_b;
      ds.y[i] = -1.0;
    }
    ds.X(i, 0) = center[0] + params.stddev * normal(rng);
    ds.X(i, 1) = center[1] + params.stddev * normal(rng);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  ds = ds.subset(order);
  ds.name = "mixture";
  return flip_labels(ds, flip_rate, derive_seed(seed, {0xf1u}));
}

void standardize_columns(Matrix& X) {
  if (X.rows() == 0) return;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    X.col(j).array() -= mean;
    const double sd = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(X.rows()));
    if (sd > 0.0) X.col(j) /= sd;
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyDataset, path + " has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  const auto label_it = std::find(header.begin(), header.end(), opts.label_column);
  if (label_it == header.end()) {
    throw Error(ErrorKind::MissingColumn, "no column named '" + opts.label_column + "'");
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::vector<long> rejected;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " cells, got " +
                                             std::to_string(cells.size()));
    }
    bool missing = false;
    std::vector<double> features;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      if (is_missing(cell)) {
        missing = true;
        break;
      }
      if (c == label_col) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": column '" +
                                               header[c] + "' is not numeric: '" + cell + "'");
      }
      features.push_back(v);
    }
    if (missing) {
      rejected.push_back(line_no);
      continue;
    }
    labels.push_back(trim(cells[label_col]) == opts.positive_label ? 1.0 : -1.0);
    rows.push_back(std::move(features));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, path + " has no usable rows");

  Dataset ds;
  ds.name = path;
  ds.rejected_lines = std::move(rejected);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) ds.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ds.y[i] = labels[static_cast<std::size_t>(i)];
  }
  ds.flipped_mask.assign(rows.size(), false);
  if (opts.standardize) standardize_columns(ds.X);
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitPlan& plan, long repeat_index) {
  if (repeat_index < 0 || repeat_index >= plan.n_repeats) {
    throw Error(ErrorKind::InvalidConfig, "repeat index " + std::to_string(repeat_index) +
                                              " outside [0, " + std::to_string(plan.n_repeats) + ")");
  }
  if (plan.n_train < 0 || plan.n_test < 0 || plan.n_train + plan.n_test > ds.n()) {
    throw Error(ErrorKind::PlanExceedsData, std::to_string(plan.n_train) + " + " +
                                                std::to_string(plan.n_test) + " rows requested from " +
                                                std::to_string(ds.n()));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.n()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(derive_seed(plan.seed, {static_cast<std::uint64_t>(repeat_index), 0x59u}));
  std::shuffle(order.begin(), order.end(), rng);

  const auto train_end = order.begin() + plan.n_train;
  std::vector<Eigen::Index> train(order.begin(), train_end);
  std::vector<Eigen::Index> test(train_end, train_end + plan.n_test);
  return {ds.subset(train), ds.subset(test)};
}

std::vector<std::vector<Eigen::Index>> load_split_indices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::vector<std::vector<Eigen::Index>> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<Eigen::Index> rows;
    std::string tok;
    while (tokens >> tok) {
      std::size_t used = 0;
      long v = -1;
      try {
        v = std::stol(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 0) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad index '" + tok + "'");
      }
      rows.push_back(v);
    }
    if (!rows.empty()) out.push_back(std::move(rows));
  }
  return out;
}

std::pair<Dataset, Dataset> split_from_indices(const Dataset& ds,
                                               const std::vector<Eigen::Index>& train_rows) {
  std::vector<bool> in_train(static_cast<std::size_t>(ds.n()), false);
  for (auto r : train_rows) {
    if (r < 0 || r >= ds.n()) {
      throw Error(ErrorKind::PlanExceedsData, "train index " + std::to_string(r) + " out of range");
    }
    in_train[static_cast<std::size_t>(r)] = true;
  }
  std::vector<Eigen::Index> test;
  for (Eigen::Index r = 0; r < ds.n(); ++r) {
    if (!in_train[static_cast<std::size_t>(r)]) test.push_back(r);
  }
  return {ds.subset(train_rows), ds.subset(test)};
}

Dataset flip_labels(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 0.5)) {
    throw Error(ErrorKind::InvalidConfig, "flip rate must lie in [0, 0.5)");
  }
  Dataset out = ds;
  const auto n = static_cast<std::size_t>(ds.n());
  const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
  if (count == 0) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, {0xf11bu}));
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < count; ++k) {
    const auto i = order[k];
    out.y[static_cast<Eigen::Index>(i)] = -out.y[static_cast<Eigen::Index>(i)];
    out.flipped_mask[i] = !out.flipped_mask[i];
  }
  return out;
}

}  // namespace repgp
