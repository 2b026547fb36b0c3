#include "repgp/ep.hpp"

#include "repgp/error.hpp"
#include "repgp/likelihood.hpp"
#include "sweep.hpp"

#include <cmath>
#include <string>

namespace repgp {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::Diverged: return "diverged";
    case Verdict::MaxIters: return "max-iters";
  }
  return "unknown";
}

std::string_view to_string(SkipPolicy p) {
  return p == SkipPolicy::SkipSite ? "skip-site" : "clamp-variance";
}

void InferenceOptions::validate() const {
  if (max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tol must be > 0");
  if (!(variance_clamp_floor > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "variance_clamp_floor must be > 0");
  }
}

void validate_fit_inputs(const Matrix& K, const Vector& y, double eps) {
  if (y.size() == 0) throw Error(ErrorKind::DegenerateData, "no training points");
  if (K.rows() != K.cols() || K.rows() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "K is " + std::to_string(K.rows()) + "x" +
                                                  std::to_string(K.cols()) + " but y has " +
                                                  std::to_string(y.size()) + " labels");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) {
      throw Error(ErrorKind::InvalidConfig, "label " + std::to_string(i) + " is not +-1");
    }
  }
  if (!(eps >= 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::InvalidConfig, "epsilon must lie in [0, 0.5]");
  }
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NonSPDKernel, "Cholesky factorization of K failed");
  }
}

Cavity cavity(const PosteriorState& state, std::size_t i, double floor) {
  const auto idx = static_cast<Eigen::Index>(i);
  const double a_ii = state.cov(idx, idx);
  const double tau = state.site_precision[idx];
  const double cav_precision = 1.0 / a_ii - tau;
  if (!(cav_precision > floor)) {
    throw Error(ErrorKind::InvalidCavity,
                "site " + std::to_string(i) + " cavity precision " + std::to_string(cav_precision));
  }
  const double lambda = 1.0 / cav_precision;
  // h_cav = h_i + lambda tau (h_i - m_i), expanded so tau = 0 needs no m_i.
  const double h = state.mean[idx];
  const double h_cav = h + lambda * (tau * h - tau * state.site_m[idx]);
  return {lambda, h_cav};
}

double compute_R(const PosteriorState& prev, const PosteriorState& curr) {
  if (prev.size() != curr.size()) {
    throw Error(ErrorKind::DimensionMismatch, "states have different sizes");
  }
  return (curr.site_natural_means() - prev.site_natural_means()).norm();
}

namespace {

FitResult powered_fit(const Matrix& K, const Vector& y, double eps, double u,
                      const InferenceOptions& opts) {
  validate_fit_inputs(K, y, eps);
  opts.validate();
  const StepTilt tilt = StepTilt::powered(eps, u);

  auto update = [&](const PosteriorState&, std::size_t i, const Cavity& cav, FitEvents& events, int) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    Gaussian1D site;
    try {
      site = project_site(tilt, cav.mean, cav.variance, yi);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonPositiveVariance ||
          opts.skip_policy != SkipPolicy::ClampVariance) {
        throw;
      }
      const double alpha = step_alpha(tilt, cav.mean, cav.variance, yi);
      const Gaussian1D tilted =
          Gaussian1D::from_moments(cav.mean + cav.variance * alpha, opts.variance_clamp_floor);
      site = gaussian_divide(tilted, Gaussian1D::from_moments(cav.mean, cav.variance));
      ++events.clamped;
    }
    // v_i <- u v_i with m_i fixed.
    return detail::SiteProposal{site.precision / u, site.natural_mean / u, 0.0};
  };
  return detail::run_sweeps(K, opts, update);
}

}  // namespace

FitResult ep_fit(const Matrix& K, const Vector& y, double eps, const InferenceOptions& opts) {
  return powered_fit(K, y, eps, 1.0, opts);
}

FitResult pep_fit(const Matrix& K, const Vector& y, double eps, const InferenceOptions& opts) {
  if (!(opts.power_u > 0.0 && opts.power_u <= 1.0)) {
    throw Error(ErrorKind::InvalidPower, "power must lie in (0, 1]");
  }
  return powered_fit(K, y, eps, opts.power_u, opts);
}

}  // namespace repgp
