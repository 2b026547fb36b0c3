#pragma once

#include "repgp/ep.hpp"
#include "repgp/gaussian.hpp"

#include <functional>

namespace repgp {

enum class LineSearchKind { GoldenSection, GridRefine };

/// How the relaxation factor is taken back out of the relaxed site.
///  Paper:    1/v_i = 1/v_b + b,  m_i = v_i (m_b / v_b + m_old b)
///  Division: 1/v_i = 1/v_b - b,  m_i = v_i (m_b / v_b - m_old b)
enum class RelaxationRemoval { Paper, Division };

std::string_view to_string(LineSearchKind k);
std::string_view to_string(RelaxationRemoval r);

struct RepOptions : InferenceOptions {
  /// Weight c of the l1 penalty on the relaxation precision.
  double penalty_c = 20.0;
  double b_max = 1e3;
  LineSearchKind line_search = LineSearchKind::GridRefine;
  int eval_budget = 40;
  double b_zero_threshold = 1e-10;
  RelaxationRemoval removal = RelaxationRemoval::Paper;

  void validate() const;
};

/// Everything the per-site line search needs: the cavity, the site being
/// replaced (its mean anchors the relaxation factor), A_ii and the label.
struct RelaxedSiteLocals {
  Cavity cavity;
  double m_old = 0.0;
  double precision_old = 0.0;
  double a_ii = 0.0;
  double y = 1.0;
};

/// Product of the cavity with r_i = N(f | m_old, 1/b).
Cavity multiply_cavity_relaxation(const Cavity& cavity, double b, double m_old);

/// Site t_{i,b} from moment matching against the relaxed cavity.
Gaussian1D relaxed_projection(const Cavity& relaxed_cavity, double y, double eps);

Gaussian1D remove_relaxation(const Gaussian1D& site_b, double b, double m_old,
                             RelaxationRemoval mode = RelaxationRemoval::Paper);

/// Relaxed KL between the relaxed tilted distribution and its moment-matched
/// Gaussian, plus c * b. Throws NonFiniteObjective when an intermediate
/// quantity leaves its valid range at this b.
double q_objective(double b, const RelaxedSiteLocals& locals, double eps, double c);

/// Minimizes f over [0, b_max] within the evaluation budget. b = 0 is always
/// probed; `seed`, when positive, is probed too. Results below the zero
/// threshold snap to 0. Non-finite or throwing evaluations count as +inf.
double minimize_on_interval(const std::function<double(double)>& f, const RepOptions& opts,
                            double seed = 0.0);

double line_search_b(const RelaxedSiteLocals& locals, double eps, const RepOptions& opts,
                     double seed = 0.0);

/// Snapshot handed to an observer after each relaxed projection.
struct ProjectionRecord {
  std::size_t site = 0;
  int sweep = 0;
  double y = 1.0;
  double b = 0.0;
  Cavity relaxed_cavity;
  Gaussian1D site_b;
};

using ProjectionObserver = std::function<void(const ProjectionRecord&)>;

/// Relaxed EP for GP classification.
FitResult rep_fit(const Matrix& K, const Vector& y, double eps, const RepOptions& opts,
                  const ProjectionObserver& observer = {});

}  // namespace repgp
