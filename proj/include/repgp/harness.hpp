#pragma once

#include "repgp/data.hpp"
#include "repgp/ep.hpp"
#include "repgp/kernels.hpp"
#include "repgp/oracle.hpp"
#include "repgp/rep.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace repgp {

enum class Algorithm { Ep, Pep, Rep };
enum class SourceKind { Toy5, Mixture, Csv };
enum class OutputFormat { Json, Csv };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct DatasetSource {
  SourceKind kind = SourceKind::Mixture;
  std::string path;
  std::string label_column = "label";
  std::string positive_label = "1";
  /// Optional file of predefined train-index lists, one line per repeat.
  std::string split_file;
  bool standardize = true;
  /// Also flip labels in the test split (the Spam protocol).
  bool flip_test = false;
  MixtureParams mixture;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::Rep;
  KernelSpec kernel;
  /// When non-empty, the rbf width is chosen by k-fold cross-validation over
  /// these multiples of the median pairwise training distance.
  std::vector<double> cv_width_multipliers;
  int cv_folds = 5;
  int cv_max_iters = 50;
  /// Labeling-error rate in the likelihood; unset means "match flip_rate".
  std::optional<double> epsilon;
  double power_u = 0.8;
  double penalty_c = 20.0;
  DatasetSource dataset;
  SplitPlan plan{400, 2000, 1, 0};
  long repeat = 0;
  double flip_rate = 0.0;
  RepOptions fit;
  std::optional<OracleOptions> oracle;
  std::uint64_t seed = 0;
  /// Grid coordinates this run belongs to, e.g. {"penalty_c": 20}.
  std::map<std::string, double> grid_point;

  void validate() const;
  double resolved_epsilon() const;
};

struct RunRecord {
  std::string run_id;
  ExperimentConfig config;
  std::vector<double> trace;
  Verdict verdict = Verdict::MaxIters;
  /// Index (1-based) of the first sweep with R < tol, or 0.
  int iterations_to_converge = 0;
  double wall_seconds = 0.0;
  double width_used = 0.0;
  double epsilon_used = 0.0;
  long n_train = 0;
  long n_test = 0;
  Vector site_m;
  Vector site_precision;
  Vector relax_b;
  double test_error = 0.0;
  std::optional<MomentError> moment_error;
  double oracle_ess = 0.0;
  FitEvents events;
  /// Non-empty when the run failed; the other result fields are then unset.
  std::string error;

  bool diverged() const { return verdict != Verdict::Converged; }
};

struct Prediction {
  Vector labels;
  /// Probability of the predicted label.
  Vector probabilities;
  Vector latent_mean;
  Vector latent_var;
};

/// Predictive distribution at test inputs. `kss` holds k(x*, x*) per test point.
Prediction predict(const PosteriorState& state, const Matrix& K, const Matrix& Kstar,
                   const Vector& kss, double eps);

/// Fits the configured algorithm on a Gram matrix; the shared entry point for
/// run_experiment and cross-validation.
FitResult fit_algorithm(const ExperimentConfig& config, const Matrix& K, const Vector& y,
                        double eps, int max_iters);

/// Training and test splits for this config's repeat.
std::pair<Dataset, Dataset> build_datasets(const ExperimentConfig& config);

/// k-fold cross-validated choice among the configured width multipliers.
double cross_validate_width(const ExperimentConfig& config, const Dataset& train, double eps);

RunRecord run_experiment(const ExperimentConfig& config);

using ParameterGrid = std::map<std::string, std::vector<double>>;

/// Cartesian product over the grid (keys: penalty_c, power_u, epsilon,
/// flip_rate, width, algorithm [0=ep,1=pep,2=rep]) times plan.n_repeats.
/// A failing cell is recorded with its error and does not stop the grid.
std::vector<RunRecord> run_grid(const ExperimentConfig& base, const ParameterGrid& grid,
                                int threads = 1);

struct SummaryRow {
  std::string key;
  Algorithm algorithm = Algorithm::Ep;
  std::map<std::string, double> grid_point;
  long runs = 0;
  long failed = 0;
  long divergences = 0;
  double mean_test_error = 0.0;
  double stddev_test_error = 0.0;
  /// Mean iterations over converged runs only (NaN if none converged).
  double mean_iterations_converged = 0.0;
  /// Mean iterations with non-converged runs scored at max_iters.
  double mean_iterations_scored = 0.0;
  std::optional<double> mean_mse_mean;
  std::optional<double> mean_mse_cov;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

void emit_records(const std::vector<RunRecord>& records, OutputFormat format,
                  const std::string& path);
void emit_summary(const std::vector<SummaryRow>& rows, OutputFormat format,
                  const std::string& path);
/// Long-format (run_id, iter, R) trace table as CSV.
void emit_traces(const std::vector<RunRecord>& records, const std::string& path);
/// Long-format (run_id, site, m, precision, b) final sites as CSV.
void emit_sites(const std::vector<RunRecord>& records, const std::string& path);
/// Timing and other non-deterministic metadata, kept apart from the records.
void emit_metadata(const std::vector<RunRecord>& records, const std::string& path);

}  // namespace repgp
