#include "repgp/data.hpp"
#include "repgp/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace repgp;

namespace {

std::string fixture(const std::string& name) { return std::string(REPGP_FIXTURES) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("repgp_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

// Perceptron with bias; returns true once an epoch makes no mistakes.
bool linearly_separable(const Matrix& X, const Vector& y) {
  Vector w = Vector::Zero(X.cols());
  double b = 0.0;
  for (int epoch = 0; epoch < 10000; ++epoch) {
    bool clean = true;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (y[i] * (X.row(i).dot(w) + b) <= 0.0) {
        w += y[i] * X.row(i).transpose();
        b += y[i];
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("toy five points") {
  for (std::uint64_t seed : {0u, 1u, 42u}) {
    const Dataset d = gen_toy_five_points(seed);
    CHECK(d.n() == 5);
    CHECK(d.d() == 2);
    CHECK(d.flip_count() == 1);
    std::vector<Eigen::Index> keep;
    Eigen::Index flipped = -1;
    for (Eigen::Index i = 0; i < 5; ++i) {
      if (d.flipped_mask[static_cast<std::size_t>(i)]) {
        flipped = i;
      } else {
        keep.push_back(i);
      }
    }
    // the flipped point is the right-most one
    CHECK(d.X(flipped, 0) == d.X.col(0).maxCoeff());
    const Dataset rest = d.subset(keep);
    CHECK(linearly_separable(rest.X, rest.y));
    CHECK_FALSE(linearly_separable(d.X, d.y));
    const Dataset again = gen_toy_five_points(seed);
    CHECK(again.X == d.X);
    CHECK(again.y == d.y);
  }
  CHECK(gen_toy_five_points(0).X != gen_toy_five_points(1).X);
}

TEST_CASE("mixture generator") {
  const Dataset clean = gen_mixture(200, 0.0, 3);
  CHECK(clean.n() == 400);
  CHECK(clean.flip_count() == 0);
  const Dataset noisy = gen_mixture(200, 0.2, 3);
  CHECK(noisy.flip_count() == 80);
  CHECK(noisy.X == clean.X);
  for (Eigen::Index i = 0; i < 400; ++i) {
    const bool flipped = noisy.flipped_mask[static_cast<std::size_t>(i)];
    CHECK((noisy.y[i] != clean.y[i]) == flipped);
  }

  // class means against the configured components
  const Dataset big = gen_mixture(4000, 0.0, 4);
  const MixtureParams p;
  Eigen::Vector2d sum_pos = Eigen::Vector2d::Zero(), sum_neg = Eigen::Vector2d::Zero();
  long n_pos = 0, n_neg = 0, upper = 0;
  for (Eigen::Index i = 0; i < big.n(); ++i) {
    if (big.y[i] > 0) {
      sum_pos += big.X.row(i).transpose();
      ++n_pos;
    } else {
      sum_neg += big.X.row(i).transpose();
      ++n_neg;
      upper += big.X(i, 1) > 0.0;
    }
  }
  CHECK(n_pos == 4000);
  const Eigen::Vector2d mean_pos = sum_pos / n_pos;
  CHECK((mean_pos - p.class1_mean).cwiseAbs().maxCoeff() < 5.0 * p.stddev / std::sqrt(4000.0));
  // the negative class is an equal mixture: its mean is the midpoint and its
  // second coordinate has sd sqrt(1 + 4)
  const Eigen::Vector2d mid = 0.5 * (p.class2_mean_a + p.class2_mean_b);
  const Eigen::Vector2d mean_neg = sum_neg / n_neg;
  CHECK(std::abs(mean_neg[0] - mid[0]) < 5.0 * p.stddev / std::sqrt(4000.0));
  CHECK(std::abs(mean_neg[1] - mid[1]) < 5.0 * std::sqrt(5.0) / std::sqrt(4000.0));
  CHECK(std::abs(upper - 2000) < 5.0 * std::sqrt(1000.0));
  CHECK_THROWS_AS(gen_mixture(0, 0.0, 1), Error);
}

TEST_CASE("flip labels") {
  const Dataset d = gen_mixture(153, 0.0, 5);
  CHECK(d.n() == 306);
  const Dataset same = flip_labels(d, 0.0, 9);
  CHECK(same.y == d.y);
  const Dataset f = flip_labels(d, 0.1, 9);
  CHECK(f.flip_count() == 30);
  const Dataset back = flip_labels(f, 0.1, 9);
  CHECK(back.y == d.y);
  CHECK(back.flip_count() == 0);
  CHECK_THROWS_AS(flip_labels(d, 0.5, 1), Error);
  CHECK_THROWS_AS(flip_labels(d, -0.1, 1), Error);
}

TEST_CASE("csv loading") {
  const std::string ok = write_temp("ok.csv", "a,b,label\n1,2,yes\n3,4,no\n5,6,yes\n");
  const Dataset d = load_csv(ok, {"label", "yes", false});
  CHECK(d.n() == 3);
  CHECK(d.d() == 2);
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == -1.0);
  CHECK(d.X(2, 1) == 6.0);
  const Dataset s = load_csv(ok, {"label", "yes", true});
  CHECK(std::abs(s.X.col(0).mean()) < 1e-15);
  CHECK(std::abs(s.X.col(0).squaredNorm() / 3.0 - 1.0) < 1e-12);

  const std::string bad = write_temp("bad.csv", "a,b,label\n1,2,yes\n3,x,no\n");
  try {
    (void)load_csv(bad, {"label", "yes", false});
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const std::string missing = write_temp("missing.csv", "a,b,label\n1,2,yes\n3,?,no\n4,,yes\n7,8,no\n");
  const Dataset m = load_csv(missing, {"label", "yes", false});
  CHECK(m.n() == 2);
  CHECK(m.rejected_lines == std::vector<long>{3, 4});

  try {
    (void)load_csv(ok, {"class", "yes", false});
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingColumn);
  }
  const std::string empty = write_temp("empty.csv", "a,b,label\n");
  try {
    (void)load_csv(empty, {"label", "yes", false});
    FAIL("expected EmptyDataset");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDataset);
  }
}

TEST_CASE("haberman-format fixture") {
  const Dataset h = load_csv(fixture("haberman.csv"), {"survival", "2", true});
  CHECK(h.d() == 3);
  CHECK(h.n() == 306);
  for (Eigen::Index i = 0; i < h.n(); ++i) CHECK(std::abs(h.y[i]) == 1.0);
}

TEST_CASE("split plans") {
  const Dataset heart = load_csv(fixture("heart.csv"), {"presence", "2", true});
  REQUIRE(heart.n() == 270);
  const SplitPlan plan{81, 189, 20, 7};
  std::set<std::vector<double>> seen;
  for (long r = 0; r < 20; ++r) {
    const auto [train, test] = split(heart, plan, r);
    CHECK(train.n() == 81);
    CHECK(test.n() == 189);
    std::vector<double> key(train.X.data(), train.X.data() + train.X.size());
    std::sort(key.begin(), key.end());
    seen.insert(key);
    const auto [train2, test2] = split(heart, plan, r);
    CHECK(train2.X == train.X);
  }
  CHECK(seen.size() == 20);

  // full partition covers every row exactly once
  const Dataset small = gen_mixture(10, 0.0, 1);
  const auto [a, b] = split(small, {12, 8, 1, 3}, 0);
  std::multiset<double> all, parts;
  for (Eigen::Index i = 0; i < small.n(); ++i) all.insert(small.X(i, 0));
  for (Eigen::Index i = 0; i < a.n(); ++i) parts.insert(a.X(i, 0));
  for (Eigen::Index i = 0; i < b.n(); ++i) parts.insert(b.X(i, 0));
  CHECK(all == parts);

  try {
    (void)split(small, {15, 8, 1, 3}, 0);
    FAIL("expected PlanExceedsData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlanExceedsData);
  }
  CHECK_THROWS_AS(split(small, {5, 5, 2, 3}, 2), Error);
}

TEST_CASE("split index files") {
  const std::string path = write_temp("splits.txt", "0 2 4\n1 3\n");
  const auto lists = load_split_indices(path);
  REQUIRE(lists.size() == 2);
  CHECK(lists[0] == std::vector<Eigen::Index>{0, 2, 4});
  const Dataset d = gen_mixture(3, 0.0, 2);
  const auto [train, test] = split_from_indices(d, lists[1]);
  CHECK(train.n() == 2);
  CHECK(test.n() == 4);
  CHECK(test.X.row(0) == d.X.row(0));
  CHECK_THROWS_AS(split_from_indices(d, {0, 9}), Error);
  const std::string bad = write_temp("badsplits.txt", "0 1\n2 x\n");
  CHECK_THROWS_AS(load_split_indices(bad), Error);
}
