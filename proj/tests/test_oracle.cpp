#include "repgp/data.hpp"
#include "repgp/ep.hpp"
#include "repgp/error.hpp"
#include "repgp/kernels.hpp"
#include "repgp/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace repgp;

TEST_CASE("flat likelihood returns the prior") {
  std::mt19937_64 rng(1);
  const Matrix K = testsupport::random_spd(3, rng);
  OracleOptions o;
  o.n_samples = 200'000;
  const OracleResult r = is_posterior_moments(K, testsupport::random_labels(3, rng), 0.5, o);
  CHECK(r.effective_sample_size == doctest::Approx(2e5));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(r.mean[i]) < 4.0 * r.mean_se[i]);
    CHECK(std::abs(r.covariance(i, i) - K(i, i)) < 4.0 * r.variance_se[i]);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(r.covariance(i, j) - K(i, j)) < 0.02);
  }
}

TEST_CASE("single site matches the truncated normal") {
  Matrix K(1, 1);
  K << 1.0;
  Vector y(1);
  y << 1.0;
  OracleOptions o;
  o.seed = 17;
  const OracleResult r = is_posterior_moments(K, y, 0.0, o);
  CHECK(r.n_samples == 1'000'000);
  CHECK(std::abs(r.mean[0] - std::sqrt(2.0 / std::numbers::pi)) < 3.0 * r.mean_se[0]);
  CHECK(std::abs(r.covariance(0, 0) - (1.0 - 2.0 / std::numbers::pi)) < 3.0 * r.variance_se[0]);
  CHECK(r.effective_sample_size <= r.n_samples);
  CHECK(r.effective_sample_size == doctest::Approx(5e5).epsilon(0.01));
}

TEST_CASE("independent seeds agree within combined errors") {
  const Dataset toy = gen_toy_five_points(0);
  const Matrix K = gram(KernelSpec::rbf(1.5), toy.X);
  OracleOptions a;
  a.seed = 1;
  OracleOptions b;
  b.seed = 2;
  const OracleResult ra = is_posterior_moments(K, toy.y, 0.2, a);
  const OracleResult rb = is_posterior_moments(K, toy.y, 0.2, b);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double se = std::hypot(ra.mean_se[i], rb.mean_se[i]);
    CHECK(std::abs(ra.mean[i] - rb.mean[i]) < 4.0 * se);
    const double vse = std::hypot(ra.variance_se[i], rb.variance_se[i]);
    CHECK(std::abs(ra.covariance(i, i) - rb.covariance(i, i)) < 4.0 * vse);
  }
  CHECK((ra.covariance - ra.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const OracleResult again = is_posterior_moments(K, toy.y, 0.2, a);
  CHECK(again.mean == ra.mean);
  CHECK(again.covariance == ra.covariance);
}

TEST_CASE("thread count does not change the estimate") {
  const Dataset toy = gen_toy_five_points(1);
  OracleOptions o;
  o.n_samples = 300'000;
  o.chunk_size = 10'000;
  o.threads = 1;
  const OracleResult one = is_weight_space_moments(toy.X, toy.y, 0.2, o);
  o.threads = 3;
  const OracleResult three = is_weight_space_moments(toy.X, toy.y, 0.2, o);
  CHECK(one.mean == three.mean);
  CHECK(one.covariance == three.covariance);
}

TEST_CASE("error rate shrinks like one over root n") {
  Matrix K(1, 1);
  K << 1.0;
  Vector y(1);
  y << 1.0;
  const double truth = std::sqrt(2.0 / std::numbers::pi);
  auto mse_at = [&](long n) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      OracleOptions o;
      o.n_samples = n;
      o.seed = 1000 + seed;
      const double e = is_posterior_moments(K, y, 0.0, o).mean[0] - truth;
      s += e * e;
    }
    return s / 12.0;
  };
  const double ratio = mse_at(10'000) / mse_at(1'000'000);
  CHECK(ratio > 100.0 / 3.0);
  CHECK(ratio < 300.0);
}

TEST_CASE("weighted moments") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Matrix s(3, 50);
  Vector w(50);
  for (int j = 0; j < 50; ++j) {
    for (int i = 0; i < 3; ++i) s(i, j) = nd(rng);
    w[j] = ud(rng);
  }
  Vector mean;
  Matrix cov;
  weighted_moments(s, w, mean, cov);
  double tw = 0.0;
  for (int j = 0; j < 50; ++j) tw += w[j];
  for (int i = 0; i < 3; ++i) {
    double m = 0.0;
    for (int j = 0; j < 50; ++j) m += w[j] * s(i, j);
    m /= tw;
    CHECK(mean[i] == doctest::Approx(m).epsilon(1e-13));
    for (int k = 0; k < 3; ++k) {
      double mk = 0.0;
      for (int j = 0; j < 50; ++j) mk += w[j] * s(k, j);
      mk /= tw;
      double c = 0.0;
      for (int j = 0; j < 50; ++j) c += w[j] * (s(i, j) - m) * (s(k, j) - mk);
      CHECK(cov(i, k) == doctest::Approx(c / tw).epsilon(1e-12));
    }
  }
  // powers of two rescale exactly
  Vector mean2;
  Matrix cov2;
  weighted_moments(s, w * 1024.0, mean2, cov2);
  CHECK(mean2 == mean);
  CHECK(cov2 == cov);
}

TEST_CASE("moment error") {
  OracleResult o;
  o.mean = Vector::LinSpaced(4, -1.0, 2.0);
  std::mt19937_64 rng(3);
  o.covariance = testsupport::random_spd(4, rng);
  const MomentError zero = moment_error(o.mean, o.covariance, o);
  CHECK(zero.mse_mean == 0.0);
  CHECK(zero.mse_cov == 0.0);
  const MomentError shifted = moment_error(o.mean.array() + 0.3, o.covariance, o);
  CHECK(shifted.mse_mean == doctest::Approx(0.09));
  const Matrix other = testsupport::random_spd(4, rng);
  const Vector m2 = Vector::LinSpaced(4, 0.5, -0.5);
  const MomentError e = moment_error(m2, other, o);
  double sm = 0.0, sc = 0.0;
  for (int i = 0; i < 4; ++i) {
    sm += (m2[i] - o.mean[i]) * (m2[i] - o.mean[i]);
    for (int j = 0; j < 4; ++j) sc += (other(i, j) - o.covariance(i, j)) * (other(i, j) - o.covariance(i, j));
  }
  CHECK(e.mse_mean == doctest::Approx(sm / 4.0).epsilon(1e-14));
  CHECK(e.mse_cov == doctest::Approx(sc / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(moment_error(Vector::Zero(3), o.covariance, o), Error);
}

TEST_CASE("input checks and degenerate weights") {
  Matrix K(2, 2);
  K << 1.0, 0.999999, 0.999999, 1.0;
  Vector y(2);
  y << 1.0, -1.0;
  OracleOptions o;
  o.n_samples = 10'000;
  try {
    (void)is_posterior_moments(K, y, 0.0, o);
    FAIL("expected DegenerateWeights");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateWeights);
  }
  o.n_samples = 5'000;
  CHECK_THROWS_AS(is_posterior_moments(Matrix::Identity(2, 2), y, 0.1, o), Error);
  o.n_samples = 10'000;
  CHECK_THROWS_AS(is_posterior_moments(Matrix::Identity(3, 3), y, 0.1, o), Error);
}

TEST_CASE("weight-space posterior agrees with the latent EP posterior") {
  const Dataset toy = gen_toy_five_points(3);
  const Matrix K = gram(KernelSpec::linear(), toy.X);
  const FitResult r = ep_fit(K, toy.y, 0.2);
  Vector mw;
  Matrix Sw;
  weight_space_posterior(toy.X, r.state.site_precision, r.state.site_natural_means(), mw, Sw);
  CHECK((toy.X * mw - r.state.mean).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((toy.X * Sw * toy.X.transpose() - r.state.cov).cwiseAbs().maxCoeff() < 1e-6);
}
