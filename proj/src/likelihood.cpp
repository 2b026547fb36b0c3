#include "repgp/likelihood.hpp"

#include "repgp/error.hpp"

#include <cmath>
#include <string>

namespace repgp {

namespace {

void check_cavity(double cavity_var) {
  if (!(cavity_var > 0.0) || !std::isfinite(cavity_var)) {
    throw Error(ErrorKind::InvalidCavity, "cavity variance " + std::to_string(cavity_var));
  }
}

}  // namespace

double NoiseModel::value(double y, double f) const {
  return y * f >= 0.0 ? 1.0 - epsilon : epsilon;
}

StepTilt StepTilt::plain(double eps) { return {eps, 1.0 - 2.0 * eps}; }

StepTilt StepTilt::powered(double eps, double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error(ErrorKind::InvalidPower, "power must lie in (0, 1], got " + std::to_string(u));
  }
  // u == 1 must reproduce the plain coefficients bit for bit.
  if (u == 1.0) return plain(eps);
  const double lo = std::pow(eps, u);
  return {lo, std::pow(1.0 - eps, u) - lo};
}

double tilted_log_partition(double z, double eps) {
  if (eps == 0.0) return std_normal_log_cdf(z);
  return std::log(eps + (1.0 - 2.0 * eps) * std_normal_cdf(z));
}

double step_alpha(const StepTilt& tilt, double cavity_mean, double cavity_var, double y) {
  check_cavity(cavity_var);
  const double sd = std::sqrt(cavity_var);
  const double z = y * cavity_mean / sd;
  double ratio;
  if (tilt.slope == 0.0) {
    ratio = 0.0;
  } else if (tilt.floor == 0.0) {
    ratio = inverse_mills_ratio(z);
  } else {
    ratio = tilt.slope * std_normal_pdf(z) / (tilt.floor + tilt.slope * std_normal_cdf(z));
  }
  return y * ratio / sd;
}

double ep_alpha(double cavity_mean, double cavity_var, double y, double eps) {
  return step_alpha(StepTilt::plain(eps), cavity_mean, cavity_var, y);
}

double pep_alpha(double cavity_mean, double cavity_var, double y, double eps, double u) {
  return step_alpha(StepTilt::powered(eps, u), cavity_mean, cavity_var, y);
}

TiltedMoments step_moments(const StepTilt& tilt, double cavity_mean, double cavity_var, double y) {
  const double alpha = step_alpha(tilt, cavity_mean, cavity_var, y);
  const double mean = cavity_mean + cavity_var * alpha;
  // d^2 log Z / dh^2 = -alpha * mean / lambda for any step tilt.
  const double shrink = 1.0 - alpha * mean;
  if (!(shrink > 0.0) || !std::isfinite(shrink)) {
    throw Error(ErrorKind::NonPositiveVariance,
                "tilted variance factor " + std::to_string(shrink));
  }
  return {mean, cavity_var * shrink, alpha};
}

TiltedMoments tilted_moments(double cavity_mean, double cavity_var, double y, double eps) {
  return step_moments(StepTilt::plain(eps), cavity_mean, cavity_var, y);
}

Gaussian1D project_site(const StepTilt& tilt, double cavity_mean, double cavity_var, double y) {
  const TiltedMoments t = step_moments(tilt, cavity_mean, cavity_var, y);
  const double shrink = t.variance / cavity_var;
  const double precision = t.alpha * t.mean / (cavity_var * shrink);
  return {precision, t.mean * precision + t.alpha};
}

}  // namespace repgp
