#pragma once

#include "repgp/gaussian.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace repgp {

enum class SkipPolicy { SkipSite, ClampVariance };
enum class Verdict { Converged, Diverged, MaxIters };

std::string_view to_string(Verdict v);
std::string_view to_string(SkipPolicy p);

struct InferenceOptions {
  int max_iters = 200;
  /// Convergence threshold on R(iter).
  double tol = 1e-3;
  /// Power EP exponent; ignored by plain EP.
  double power_u = 1.0;
  SkipPolicy skip_policy = SkipPolicy::SkipSite;
  double variance_clamp_floor = 1e-6;
  std::uint64_t rng_seed = 0;
  /// Visit sites in a fresh random order each sweep instead of ascending.
  bool random_order = false;
  /// 1/A_ii - 1/v_i must exceed this for a cavity to be usable.
  double cavity_floor = 1e-12;
  double singular_floor = 1e-12;
  /// R above this is treated as divergence.
  double divergence_threshold = 1e6;

  void validate() const;
};

/// Counts of sites that were not updated normally during a fit.
struct FitEvents {
  long invalid_cavity = 0;
  long nonpositive_variance = 0;
  long clamped = 0;
  long singular_update = 0;
  long line_search_failure = 0;

  long total_skipped() const {
    return invalid_cavity + nonpositive_variance + singular_update + line_search_failure;
  }
};

struct FitResult {
  PosteriorState state;
  /// R after each full sweep.
  std::vector<double> trace;
  Verdict verdict = Verdict::MaxIters;
  FitEvents events;
  /// Smallest cavity variance seen over the whole run.
  double min_cavity_variance = 0.0;

  int iterations() const { return static_cast<int>(trace.size()); }
};

/// Cavity (partial belief) of site i: variance lambda and mean h.
struct Cavity {
  double variance = 0.0;
  double mean = 0.0;
};

/// Removes site i from the current marginal. Throws InvalidCavity when
/// 1/A_ii - 1/v_i does not exceed `floor`.
Cavity cavity(const PosteriorState& state, std::size_t i, double floor = 1e-12);

/// Euclidean norm of the change in per-site natural means m_j / v_j.
double compute_R(const PosteriorState& prev, const PosteriorState& curr);

/// Classical EP for GP classification under the labeling-noise likelihood.
FitResult ep_fit(const Matrix& K, const Vector& y, double eps, const InferenceOptions& opts = {});

/// Power EP: powered alpha, then v_i <- u v_i after each site projection.
FitResult pep_fit(const Matrix& K, const Vector& y, double eps, const InferenceOptions& opts);

/// Throws unless K is square, SPD and matches y, labels are +-1, and eps lies in [0, 0.5].
void validate_fit_inputs(const Matrix& K, const Vector& y, double eps);

}  // namespace repgp
