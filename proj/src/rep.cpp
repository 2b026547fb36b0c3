#include "repgp/rep.hpp"

#include "repgp/error.hpp"
#include "repgp/likelihood.hpp"
#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace repgp {

std::string_view to_string(LineSearchKind k) {
  return k == LineSearchKind::GoldenSection ? "golden-section" : "grid+refine";
}

std::string_view to_string(RelaxationRemoval r) {
  return r == RelaxationRemoval::Paper ? "paper" : "division";
}

void RepOptions::validate() const {
  InferenceOptions::validate();
  if (!(penalty_c > 0.0)) throw Error(ErrorKind::InvalidConfig, "penalty_c must be > 0");
  if (!(b_max > 0.0)) throw Error(ErrorKind::InvalidConfig, "b_max must be > 0");
  if (eval_budget < 4) throw Error(ErrorKind::InvalidConfig, "eval_budget must be >= 4");
}

Cavity multiply_cavity_relaxation(const Cavity& cavity, double b, double m_old) {
  if (b == 0.0) return cavity;
  const double lambda = 1.0 / (1.0 / cavity.variance + b);
  return {lambda, cavity.mean - lambda * b * (cavity.mean - m_old)};
}

Gaussian1D relaxed_projection(const Cavity& relaxed_cavity, double y, double eps) {
  return project_site(StepTilt::plain(eps), relaxed_cavity.mean, relaxed_cavity.variance, y);
}

Gaussian1D remove_relaxation(const Gaussian1D& site_b, double b, double m_old,
                             RelaxationRemoval mode) {
  if (b == 0.0) return site_b;
  const double sign = mode == RelaxationRemoval::Paper ? 1.0 : -1.0;
  return {site_b.precision + sign * b, site_b.natural_mean + sign * b * m_old};
}

namespace {

[[noreturn]] void non_finite(const char* what, double b) {
  throw Error(ErrorKind::NonFiniteObjective, std::string(what) + " at b=" + std::to_string(b));
}

// E[log p(y|f)] under the tilted distribution, times Z.
double likelihood_entropy_term(double eps, double cdf_z) {
  if (eps == 0.0) return 0.0;
  if (eps == 0.5) return std::log(0.5) * (eps + (1.0 - 2.0 * eps) * cdf_z);
  const double hi = (1.0 - eps) * std::log(1.0 - eps);
  const double lo = eps * std::log(eps);
  return (hi - lo) * cdf_z + lo;
}

}  // namespace

double q_objective(double b, const RelaxedSiteLocals& locals, double eps, double c) {
  if (!(b >= 0.0)) non_finite("negative relaxation", b);
  const Cavity& cav = locals.cavity;
  const double lambda = cav.variance;
  const Cavity rc = multiply_cavity_relaxation(cav, b, locals.m_old);

  const double sd = std::sqrt(rc.variance);
  const double z = locals.y * rc.mean / sd;
  const double log_z = tilted_log_partition(z, eps);

  TiltedMoments tilted;
  try {
    tilted = tilted_moments(rc.mean, rc.variance, locals.y, eps);
  } catch (const Error&) {
    non_finite("tilted variance", b);
  }
  const double site_precision = 1.0 / tilted.variance - 1.0 / rc.variance;

  // F = second moment of the relaxed tilted distribution, via the marginal
  // after swapping the old site for t_{i,b} and multiplying in r_i.
  const double inv_a_new = 1.0 / locals.a_ii + (site_precision - locals.precision_old);
  if (!(inv_a_new > 0.0)) non_finite("posterior marginal precision", b);
  const double a_new = 1.0 / inv_a_new;
  const double a_tilde = b == 0.0 ? a_new : a_new * (1.0 - a_new / (a_new + 1.0 / b));
  const double f_second = a_tilde + tilted.mean * tilted.mean;

  const double log_det_ratio = 1.0 + (b + site_precision) * lambda;
  if (!(log_det_ratio > 0.0)) non_finite("log-determinant argument", b);
  const double log_det = 0.5 * (std::log1p(b * lambda) - std::log(log_det_ratio));

  const double quad =
      0.5 - (f_second - 2.0 * tilted.mean * rc.mean + rc.mean * rc.mean) / (2.0 * rc.variance);

  const double entropy = likelihood_entropy_term(eps, std_normal_cdf(z)) / std::exp(log_z);
  const double q = entropy - log_z + log_det + quad + c * b;
  if (!std::isfinite(q)) non_finite("objective", b);
  return q;
}

double minimize_on_interval(const std::function<double(double)>& f, const RepOptions& opts,
                            double seed) {
  int evals = 0;
  auto eval = [&](double b) {
    ++evals;
    try {
      const double v = f(b);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteObjective) throw;
      return std::numeric_limits<double>::infinity();
    }
  };

  double best_b = 0.0;
  double best_q = eval(0.0);
  auto consider = [&](double b, double q) {
    if (q < best_q) {
      best_q = q;
      best_b = b;
    }
  };
  if (seed > 0.0 && seed <= opts.b_max) consider(seed, eval(seed));

  double lo = 0.0;
  double hi = opts.b_max;
  if (opts.line_search == LineSearchKind::GridRefine) {
    constexpr int kGridPoints = 19;
    constexpr double kGridLo = 1e-6;
    std::vector<double> grid{0.0};
    const double log_lo = std::log(kGridLo);
    const double log_hi = std::log(opts.b_max);
    for (int k = 0; k < kGridPoints; ++k) {
      grid.push_back(std::exp(log_lo + (log_hi - log_lo) * k / (kGridPoints - 1)));
    }
    std::size_t best_k = 0;
    double best_grid = best_q;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double q = eval(grid[k]);
      consider(grid[k], q);
      if (q < best_grid) {
        best_grid = q;
        best_k = k;
      }
    }
    lo = best_k == 0 ? 0.0 : grid[best_k - 1];
    hi = grid[std::min(best_k + 1, grid.size() - 1)];
  }

  if (!std::isfinite(best_q) && evals >= opts.eval_budget) {
    throw Error(ErrorKind::LineSearchFailure, "objective non-finite over the whole bracket");
  }

  // Golden-section refinement on [lo, hi] with the remaining budget.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  if (evals + 2 <= opts.eval_budget) {
    double f1 = eval(x1);
    double f2 = eval(x2);
    consider(x1, f1);
    consider(x2, f2);
    while (evals < opts.eval_budget) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = eval(x1);
        consider(x1, f1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = eval(x2);
        consider(x2, f2);
      }
    }
  }

  if (!std::isfinite(best_q)) {
    throw Error(ErrorKind::LineSearchFailure, "objective non-finite over the whole bracket");
  }
  return best_b < opts.b_zero_threshold ? 0.0 : best_b;
}

double line_search_b(const RelaxedSiteLocals& locals, double eps, const RepOptions& opts,
                     double seed) {
  return minimize_on_interval(
      [&](double b) { return q_objective(b, locals, eps, opts.penalty_c); }, opts, seed);
}

FitResult rep_fit(const Matrix& K, const Vector& y, double eps, const RepOptions& opts,
                  const ProjectionObserver& observer) {
  validate_fit_inputs(K, y, eps);
  opts.validate();

  auto update = [&](const PosteriorState& state, std::size_t i, const Cavity& cav,
                    FitEvents& events, int sweep) {
    const auto idx = static_cast<Eigen::Index>(i);
    RelaxedSiteLocals locals{cav, state.site_m[idx], state.site_precision[idx],
                             state.cov(idx, idx), y[idx]};
    const double b = line_search_b(locals, eps, opts, state.relax_b[idx]);
    const Cavity rc = multiply_cavity_relaxation(cav, b, locals.m_old);

    Gaussian1D site_b;
    try {
      site_b = relaxed_projection(rc, locals.y, eps);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonPositiveVariance ||
          opts.skip_policy != SkipPolicy::ClampVariance) {
        throw;
      }
      const double alpha = ep_alpha(rc.mean, rc.variance, locals.y, eps);
      const Gaussian1D tilted =
          Gaussian1D::from_moments(rc.mean + rc.variance * alpha, opts.variance_clamp_floor);
      site_b = gaussian_divide(tilted, Gaussian1D::from_moments(rc.mean, rc.variance));
      ++events.clamped;
    }
    if (observer) observer({i, sweep, locals.y, b, rc, site_b});

    const Gaussian1D site = remove_relaxation(site_b, b, locals.m_old, opts.removal);
    return detail::SiteProposal{site.precision, site.natural_mean, b};
  };
  return detail::run_sweeps(K, opts, update);
}

}  // namespace repgp
