#include "repgp/oracle.hpp"

#include "repgp/error.hpp"
#include "repgp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <string>
#include <vector>

namespace repgp {

namespace {

// Per-chunk partial sums. Pass one fills weight sums and the weighted first
// moment; pass two fills centered second moments.
struct ChunkSums {
  double w = 0.0;
  double w2 = 0.0;
  Vector wx;
  Matrix wxx;
  Vector w2dx2;  // sum w^2 (x - mu)^2
  Vector w2dv2;  // sum w^2 ((x - mu)^2 - var)^2
};

std::uint64_t chunk_seed(std::uint64_t seed, long chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), 0x5eedu};
  std::uint64_t out[1];
  seq.generate(reinterpret_cast<std::uint32_t*>(out), reinterpret_cast<std::uint32_t*>(out) + 2);
  return out[0];
}

class Sampler {
 public:
  Sampler(const Matrix& transform, bool report_latent, const Vector& y, double eps)
      : transform_(transform), report_latent_(report_latent), y_(y), noise_{eps} {
    // Shift log weights so the largest attainable weight is 1.
    const double top = std::max(eps, 1.0 - eps);
    log_shift_ = static_cast<double>(y.size()) * std::log(top);
  }

  Eigen::Index dim() const { return report_latent_ ? transform_.rows() : transform_.cols(); }

  // Draws chunk `c` into (samples, weights).
  void draw(std::uint64_t seed, long c, long count, Matrix& samples, Vector& weights) const {
    std::mt19937_64 rng(chunk_seed(seed, c));
    std::normal_distribution<double> normal;
    const auto p = transform_.cols();
    Matrix z(p, count);
    for (long j = 0; j < count; ++j) {
      for (Eigen::Index k = 0; k < p; ++k) z(k, j) = normal(rng);
    }
    Matrix f = transform_ * z;
    weights.resize(count);
    for (long j = 0; j < count; ++j) {
      double lw = 0.0;
      for (Eigen::Index i = 0; i < f.rows(); ++i) lw += std::log(noise_.value(y_[i], f(i, j)));
      weights[j] = std::exp(lw - log_shift_);
    }
    samples = report_latent_ ? std::move(f) : std::move(z);
  }

 private:
  Matrix transform_;
  bool report_latent_;
  Vector y_;
  NoiseModel noise_;
  double log_shift_ = 0.0;
};

template <class Fn>
std::vector<ChunkSums> for_each_chunk(long n_chunks, int threads, Fn&& fn) {
  std::vector<ChunkSums> out(static_cast<std::size_t>(n_chunks));
  const int workers = std::max(1, threads);
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (long c = t; c < n_chunks; c += workers) out[static_cast<std::size_t>(c)] = fn(c);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

OracleResult run(const Sampler& sampler, const OracleOptions& opts) {
  if (opts.n_samples < 10'000) {
    throw Error(ErrorKind::InvalidConfig, "importance sampling needs at least 1e4 samples");
  }
  const auto d = sampler.dim();
  const long chunk = std::max<long>(1, opts.chunk_size);
  const long n_chunks = (opts.n_samples + chunk - 1) / chunk;
  auto chunk_count = [&](long c) { return std::min(chunk, opts.n_samples - c * chunk); };

  auto first = for_each_chunk(n_chunks, opts.threads, [&](long c) {
    Matrix s;
    Vector w;
    sampler.draw(opts.seed, c, chunk_count(c), s, w);
    ChunkSums sums;
    sums.w = w.sum();
    sums.w2 = w.squaredNorm();
    sums.wx = s * w;
    return sums;
  });
  double total_w = 0.0;
  double total_w2 = 0.0;
  Vector total_wx = Vector::Zero(d);
  for (const auto& s : first) {
    total_w += s.w;
    total_w2 += s.w2;
    total_wx += s.wx;
  }
  if (!(total_w > 0.0)) {
    throw Error(ErrorKind::DegenerateWeights, "all importance weights are zero");
  }
  const Vector mean = total_wx / total_w;

  auto second = for_each_chunk(n_chunks, opts.threads, [&](long c) {
    Matrix s;
    Vector w;
    sampler.draw(opts.seed, c, chunk_count(c), s, w);
    s.colwise() -= mean;
    ChunkSums sums;
    sums.wxx = s * w.asDiagonal() * s.transpose();
    sums.w2dx2 = s.array().square().matrix() * w.array().square().matrix();
    return sums;
  });
  Matrix total_wxx = Matrix::Zero(d, d);
  Vector total_w2dx2 = Vector::Zero(d);
  for (const auto& s : second) {
    total_wxx += s.wxx;
    total_w2dx2 += s.w2dx2;
  }
  Matrix cov = total_wxx / total_w;
  cov = 0.5 * (cov + cov.transpose()).eval();

  // Third pass only for the variance standard errors.
  const Vector var = cov.diagonal();
  auto third = for_each_chunk(n_chunks, opts.threads, [&](long c) {
    Matrix s;
    Vector w;
    sampler.draw(opts.seed, c, chunk_count(c), s, w);
    s.colwise() -= mean;
    Matrix dev = s.array().square().matrix();
    dev.colwise() -= var;
    ChunkSums sums;
    sums.w2dv2 = dev.array().square().matrix() * w.array().square().matrix();
    return sums;
  });
  Vector total_w2dv2 = Vector::Zero(d);
  for (const auto& s : third) total_w2dv2 += s.w2dv2;

  OracleResult out;
  out.mean = mean;
  out.covariance = cov;
  out.mean_se = total_w2dx2.cwiseSqrt() / total_w;
  out.variance_se = total_w2dv2.cwiseSqrt() / total_w;
  out.effective_sample_size = total_w * total_w / total_w2;
  out.n_samples = opts.n_samples;
  out.seed = opts.seed;
  if (out.effective_sample_size < opts.min_ess) {
    throw Error(ErrorKind::DegenerateWeights,
                "effective sample size " + std::to_string(out.effective_sample_size));
  }
  return out;
}

}  // namespace

OracleResult is_posterior_moments(const Matrix& K, const Vector& y, double eps,
                                  const OracleOptions& opts) {
  if (K.rows() != y.size() || K.cols() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "K and y sizes differ");
  }
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NonSPDKernel, "K is not SPD");
  const Matrix L = llt.matrixL();
  return run(Sampler(L, true, y, eps), opts);
}

OracleResult is_weight_space_moments(const Matrix& X, const Vector& y, double eps,
                                     const OracleOptions& opts) {
  if (X.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "X and y sizes differ");
  return run(Sampler(X, false, y, eps), opts);
}

void weighted_moments(const Matrix& samples, const Vector& weights, Vector& mean, Matrix& cov) {
  const double total = weights.sum();
  mean = (samples * weights) / total;
  Matrix centered = samples.colwise() - mean;
  cov = (centered * weights.asDiagonal() * centered.transpose()) / total;
}

MomentError moment_error(const Vector& mean, const Matrix& cov, const OracleResult& oracle) {
  if (mean.size() != oracle.mean.size() || cov.rows() != oracle.covariance.rows() ||
      cov.cols() != oracle.covariance.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "estimate and oracle dimensions differ");
  }
  MomentError e;
  e.mse_mean = (mean - oracle.mean).squaredNorm() / static_cast<double>(mean.size());
  e.mse_cov = (cov - oracle.covariance).squaredNorm() / static_cast<double>(cov.size());
  return e;
}

void weight_space_posterior(const Matrix& X, const Vector& site_precision,
                            const Vector& site_natural_mean, Vector& mean, Matrix& cov) {
  const auto d = X.cols();
  const Matrix precision =
      Matrix::Identity(d, d) + X.transpose() * site_precision.asDiagonal() * X;
  cov = precision.inverse();
  cov = 0.5 * (cov + cov.transpose()).eval();
  mean = cov * (X.transpose() * site_natural_mean);
}

}  // namespace repgp
