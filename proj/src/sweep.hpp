#pragma once

// Shared sweep driver for the EP-family engines.

#include "repgp/ep.hpp"
#include "repgp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace repgp::detail {

struct SiteProposal {
  double precision = 0.0;
  double natural_mean = 0.0;
  double relax_b = 0.0;
};

inline double site_mean_of(double precision, double natural_mean) {
  return precision != 0.0 ? natural_mean / precision : 0.0;
}

// `update(state, i, cavity, events, sweep)` returns the new site for i or throws an
// Error whose kind decides how the skip is counted.
template <class Update>
FitResult run_sweeps(const Matrix& K, const InferenceOptions& opts, Update&& update) {
  FitResult out;
  out.state = PosteriorState::from_prior(K);
  out.min_cavity_variance = std::numeric_limits<double>::infinity();
  PosteriorState& state = out.state;
  const auto n = state.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.rng_seed);
  const RankOneOptions rank_opts{opts.singular_floor, true};

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const Vector prev_nat = state.site_natural_means();
    if (opts.random_order) std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t i : order) {
      Cavity cav;
      try {
        cav = cavity(state, i, opts.cavity_floor);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidCavity) throw;
        ++out.events.invalid_cavity;
        continue;
      }
      out.min_cavity_variance = std::min(out.min_cavity_variance, cav.variance);

      SiteProposal next;
      try {
        next = update(state, i, cav, out.events, iter);
        update_site(state, i, site_mean_of(next.precision, next.natural_mean), next.precision,
                    rank_opts);
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::NonPositiveVariance: ++out.events.nonpositive_variance; continue;
          case ErrorKind::InvalidCavity: ++out.events.invalid_cavity; continue;
          case ErrorKind::SingularUpdate: ++out.events.singular_update; continue;
          case ErrorKind::LineSearchFailure: ++out.events.line_search_failure; continue;
          default: throw;
        }
      }
      state.relax_b[static_cast<Eigen::Index>(i)] = next.relax_b;
    }
    state.cov.triangularView<Eigen::StrictlyUpper>() = state.cov.transpose();
    state.refresh_mean();

    const double r = (state.site_natural_means() - prev_nat).norm();
    out.trace.push_back(r);
    const bool finite = std::isfinite(r) && state.cov.allFinite() && state.mean.allFinite();
    if (!finite || r > opts.divergence_threshold) {
      out.verdict = Verdict::Diverged;
      return out;
    }
    if (r < opts.tol) {
      out.verdict = Verdict::Converged;
      return out;
    }
  }
  out.verdict = Verdict::MaxIters;
  return out;
}

}  // namespace repgp::detail
