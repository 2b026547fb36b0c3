#pragma once

#include "repgp/gaussian.hpp"

namespace repgp {

/// Labeling-noise step likelihood p(y|f) = eps + (1 - 2 eps) [y f >= 0].
struct NoiseModel {
  double epsilon = 0.0;

  double value(double y, double f) const;
};

/// A likelihood of the form  floor + slope * [y f >= 0].  Its Gaussian tilt
/// has normalizer floor + slope * cdf(z). The plain likelihood is
/// (eps, 1 - 2 eps); its u-th power is (eps^u, (1 - eps)^u - eps^u).
struct StepTilt {
  double floor = 0.0;
  double slope = 1.0;

  static StepTilt plain(double eps);
  static StepTilt powered(double eps, double u);
};

/// Tilted distribution moments plus the first derivative of log Z wrt the
/// cavity mean.
struct TiltedMoments {
  double mean = 0.0;
  double variance = 0.0;
  double alpha = 0.0;
};

/// log(eps + (1 - 2 eps) cdf(z)).
double tilted_log_partition(double z, double eps);

/// d log Z / d cavity_mean for the plain likelihood. Label y is +1 or -1.
double ep_alpha(double cavity_mean, double cavity_var, double y, double eps);

/// d log Z_u / d cavity_mean for the likelihood raised to the power u.
double pep_alpha(double cavity_mean, double cavity_var, double y, double eps, double u);

double step_alpha(const StepTilt& tilt, double cavity_mean, double cavity_var, double y);

TiltedMoments tilted_moments(double cavity_mean, double cavity_var, double y, double eps);
TiltedMoments step_moments(const StepTilt& tilt, double cavity_mean, double cavity_var, double y);

/// Site factor obtained by dividing the moment-matched tilted Gaussian by the
/// cavity. Uses the closed form  v = lambda (1/(alpha h') - 1),
/// m = h' + v alpha  written in natural parameters so v = inf is exact.
Gaussian1D project_site(const StepTilt& tilt, double cavity_mean, double cavity_var, double y);

}  // namespace repgp
