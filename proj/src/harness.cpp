#include "repgp/harness.hpp"

#include "repgp/error.hpp"
#include "repgp/likelihood.hpp"
#include "repgp/seeding.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace repgp {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ep: return "ep";
    case Algorithm::Pep: return "pep";
    case Algorithm::Rep: return "rep";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "ep") return Algorithm::Ep;
  if (s == "pep") return Algorithm::Pep;
  if (s == "rep") return Algorithm::Rep;
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm '" + std::string(s) + "'");
}

namespace {

std::string_view to_string(SourceKind k) {
  switch (k) {
    case SourceKind::Toy5: return "builtin:toy5";
    case SourceKind::Mixture: return "builtin:mixture";
    case SourceKind::Csv: return "csv";
  }
  return "unknown";
}

// Likelihood epsilon when nothing else is known about label noise.
constexpr double kDefaultEpsilon = 0.05;

}  // namespace

void ExperimentConfig::validate() const {
  fit.validate();
  if (algorithm == Algorithm::Pep && !(power_u > 0.0 && power_u <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "pep needs a power in (0, 1]");
  }
  if (algorithm == Algorithm::Rep && !(penalty_c > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "rep needs penalty_c > 0");
  }
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) {
    throw Error(ErrorKind::InvalidConfig, "flip rate must lie in [0, 0.5)");
  }
  const double eps = resolved_epsilon();
  if (!(eps >= 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidConfig, "epsilon outside [0, 0.5]");
  if (kernel.kind == KernelKind::Rbf && cv_width_multipliers.empty() && !(kernel.width > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "rbf width must be > 0");
  }
  if (!cv_width_multipliers.empty() && cv_folds < 2) {
    throw Error(ErrorKind::InvalidConfig, "cross-validation needs at least 2 folds");
  }
  if (dataset.kind == SourceKind::Csv && dataset.path.empty()) {
    throw Error(ErrorKind::InvalidConfig, "csv dataset needs a path");
  }
}

double ExperimentConfig::resolved_epsilon() const {
  if (epsilon) return *epsilon;
  return flip_rate > 0.0 ? flip_rate : kDefaultEpsilon;
}

Prediction predict(const PosteriorState& state, const Matrix& K, const Matrix& Kstar,
                   const Vector& kss, double eps) {
  if (K.rows() != static_cast<Eigen::Index>(state.size()) || Kstar.rows() != K.rows() ||
      kss.size() != Kstar.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction inputs have inconsistent sizes");
  }
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularKernel, "K is not invertible");

  // mean = K*^T K^-1 h; var = k** - k*^T K^-1 k* + k*^T K^-1 A K^-1 k*, which
  // equals k** - k*^T (K + V)^-1 k* and stays defined for v_i = inf.
  const Matrix B = llt.solve(Kstar);
  Prediction out;
  out.latent_mean = B.transpose() * state.mean;
  const Matrix AB = state.cov * B;
  const auto m = Kstar.cols();
  out.latent_var.resize(m);
  out.labels.resize(m);
  out.probabilities.resize(m);
  const StepTilt tilt = StepTilt::plain(eps);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double var = kss[j] - Kstar.col(j).dot(B.col(j)) + B.col(j).dot(AB.col(j));
    out.latent_var[j] = std::max(var, std::numeric_limits<double>::min());
    const double mu = out.latent_mean[j];
    out.labels[j] = mu >= 0.0 ? 1.0 : -1.0;
    out.probabilities[j] =
        tilt.floor + tilt.slope * std_normal_cdf(std::abs(mu) / std::sqrt(out.latent_var[j]));
  }
  return out;
}

FitResult fit_algorithm(const ExperimentConfig& config, const Matrix& K, const Vector& y,
                        double eps, int max_iters) {
  RepOptions opts = config.fit;
  opts.max_iters = max_iters;
  opts.power_u = config.power_u;
  opts.penalty_c = config.penalty_c;
  switch (config.algorithm) {
    case Algorithm::Ep: return ep_fit(K, y, eps, opts);
    case Algorithm::Pep: return pep_fit(K, y, eps, opts);
    case Algorithm::Rep: return rep_fit(K, y, eps, opts);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm");
}

std::pair<Dataset, Dataset> build_datasets(const ExperimentConfig& config) {
  const auto repeat = static_cast<std::uint64_t>(config.repeat);
  const std::uint64_t data_seed = derive_seed(config.seed, {repeat, 0xda7au});
  const std::uint64_t flip_seed = derive_seed(config.seed, {repeat, 0xf11du});
  const auto& src = config.dataset;

  switch (src.kind) {
    case SourceKind::Toy5: {
      Dataset toy = gen_toy_five_points(config.seed);
      return {toy, toy};
    }
    case SourceKind::Mixture: {
      const long total = config.plan.n_train + config.plan.n_test;
      const long per_class = (total + 1) / 2;
      Dataset clean = gen_mixture(per_class, 0.0, data_seed, src.mixture);
      std::vector<Eigen::Index> train_rows(static_cast<std::size_t>(config.plan.n_train));
      std::iota(train_rows.begin(), train_rows.end(), Eigen::Index{0});
      std::vector<Eigen::Index> test_rows(static_cast<std::size_t>(config.plan.n_test));
      std::iota(test_rows.begin(), test_rows.end(), Eigen::Index{config.plan.n_train});
      Dataset train = flip_labels(clean.subset(train_rows), config.flip_rate, flip_seed);
      Dataset test = clean.subset(test_rows);
      if (src.flip_test) test = flip_labels(test, config.flip_rate, derive_seed(flip_seed, {1u}));
      return {train, test};
    }
    case SourceKind::Csv: {
      Dataset full = load_csv(src.path, {src.label_column, src.positive_label, src.standardize});
      std::pair<Dataset, Dataset> parts;
      if (!src.split_file.empty()) {
        const auto lists = load_split_indices(src.split_file);
        if (config.repeat < 0 || config.repeat >= static_cast<long>(lists.size())) {
          throw Error(ErrorKind::PlanExceedsData, "split file has no line for repeat " +
                                                      std::to_string(config.repeat));
        }
        parts = split_from_indices(full, lists[static_cast<std::size_t>(config.repeat)]);
      } else {
        SplitPlan plan = config.plan;
        plan.n_repeats = std::max(plan.n_repeats, config.repeat + 1);
        plan.seed = derive_seed(config.seed, {0x5917u});
        parts = split(full, plan, config.repeat);
      }
      parts.first = flip_labels(parts.first, config.flip_rate, flip_seed);
      if (src.flip_test) {
        parts.second = flip_labels(parts.second, config.flip_rate, derive_seed(flip_seed, {1u}));
      }
      return parts;
    }
  }
  throw Error(ErrorKind::InvalidConfig, "unknown dataset source");
}

namespace {

double error_rate(const Vector& predicted, const Vector& truth) {
  if (truth.size() == 0) return 0.0;
  long wrong = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

Vector kernel_diagonal(const KernelSpec& spec, const Matrix& X) {
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out[i] = kernel_eval(spec, X.row(i).transpose(), X.row(i).transpose());
  }
  return out;
}

}  // namespace

double cross_validate_width(const ExperimentConfig& config, const Dataset& train, double eps) {
  const double median = median_pairwise_distance(train.X);
  const auto n = train.n();
  const int folds = static_cast<int>(std::min<Eigen::Index>(config.cv_folds, n));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(derive_seed(config.seed, {static_cast<std::uint64_t>(config.repeat), 0xcfu}));
  std::shuffle(order.begin(), order.end(), rng);

  double best_width = config.cv_width_multipliers.front() * median;
  double best_err = std::numeric_limits<double>::infinity();
  for (double mult : config.cv_width_multipliers) {
    KernelSpec spec = config.kernel;
    spec.kind = KernelKind::Rbf;
    spec.width = mult * median;
    long wrong = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> fit_rows;
      std::vector<Eigen::Index> held_rows;
      for (std::size_t k = 0; k < order.size(); ++k) {
        (static_cast<int>(k % static_cast<std::size_t>(folds)) == f ? held_rows : fit_rows)
            .push_back(order[k]);
      }
      const Dataset fit_ds = train.subset(fit_rows);
      const Dataset held = train.subset(held_rows);
      const Matrix K = gram(spec, fit_ds.X);
      try {
        const FitResult res = fit_algorithm(config, K, fit_ds.y, eps, config.cv_max_iters);
        const Prediction p = predict(res.state, K, cross_gram(spec, fit_ds.X, held.X),
                                     kernel_diagonal(spec, held.X), eps);
        for (Eigen::Index i = 0; i < held.n(); ++i) wrong += p.labels[i] != held.y[i];
      } catch (const Error&) {
        wrong += held.n();
      }
    }
    const double err = static_cast<double>(wrong) / static_cast<double>(n);
    if (err < best_err) {
      best_err = err;
      best_width = spec.width;
    }
  }
  return best_width;
}

namespace {

std::string grid_label(const std::map<std::string, double>& point) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : point) {
    if (!first) out << ';';
    first = false;
    out << k << '=' << v;
  }
  return out.str();
}

std::string make_run_id(const ExperimentConfig& c) {
  std::string id = std::string(to_string(c.algorithm));
  const std::string g = grid_label(c.grid_point);
  if (!g.empty()) id += "[" + g + "]";
  return id + "#" + std::to_string(c.repeat);
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.config = config;
  rec.run_id = make_run_id(config);
  rec.epsilon_used = config.resolved_epsilon();

  const auto [train, test] = build_datasets(config);
  rec.n_train = train.n();
  rec.n_test = test.n();

  KernelSpec spec = config.kernel;
  if (!config.cv_width_multipliers.empty()) {
    spec.kind = KernelKind::Rbf;
    spec.width = cross_validate_width(config, train, rec.epsilon_used);
  }
  rec.width_used = spec.kind == KernelKind::Rbf ? spec.width : 0.0;
  rec.config.kernel = spec;

  const Matrix K = gram(spec, train.X);
  const FitResult fit = fit_algorithm(config, K, train.y, rec.epsilon_used, config.fit.max_iters);
  rec.trace = fit.trace;
  rec.verdict = fit.verdict;
  rec.events = fit.events;
  for (std::size_t k = 0; k < fit.trace.size(); ++k) {
    if (fit.trace[k] < config.fit.tol) {
      rec.iterations_to_converge = static_cast<int>(k + 1);
      break;
    }
  }
  rec.site_m = fit.state.site_m;
  rec.site_precision = fit.state.site_precision;
  rec.relax_b = fit.state.relax_b;

  const Prediction p = predict(fit.state, K, cross_gram(spec, train.X, test.X),
                               kernel_diagonal(spec, test.X), rec.epsilon_used);
  rec.test_error = error_rate(p.labels, test.y);

  if (config.oracle) {
    if (spec.kind == KernelKind::Linear) {
      const OracleResult o = is_weight_space_moments(train.X, train.y, rec.epsilon_used, *config.oracle);
      Vector mean;
      Matrix cov;
      weight_space_posterior(train.X, fit.state.site_precision, fit.state.site_natural_means(),
                             mean, cov);
      rec.moment_error = moment_error(mean, cov, o);
      rec.oracle_ess = o.effective_sample_size;
    } else {
      const OracleResult o = is_posterior_moments(K, train.y, rec.epsilon_used, *config.oracle);
      rec.moment_error = moment_error(fit.state.mean, fit.state.cov, o);
      rec.oracle_ess = o.effective_sample_size;
    }
  }

  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

namespace {

void apply_grid_value(ExperimentConfig& c, const std::string& key, double v) {
  if (key == "penalty_c") {
    c.penalty_c = v;
  } else if (key == "power_u") {
    c.power_u = v;
  } else if (key == "epsilon") {
    c.epsilon = v;
  } else if (key == "flip_rate") {
    c.flip_rate = v;
  } else if (key == "width") {
    c.kernel.width = v;
    c.cv_width_multipliers.clear();
  } else if (key == "algorithm") {
    const int a = static_cast<int>(v);
    if (a < 0 || a > 2 || a != v) throw Error(ErrorKind::InvalidConfig, "algorithm index must be 0, 1 or 2");
    c.algorithm = static_cast<Algorithm>(a);
  } else {
    throw Error(ErrorKind::InvalidConfig, "unknown grid parameter '" + key + "'");
  }
}

}  // namespace

std::vector<RunRecord> run_grid(const ExperimentConfig& base, const ParameterGrid& grid,
                                int threads) {
  if (grid.empty()) throw Error(ErrorKind::InvalidConfig, "grid has no parameters");
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw Error(ErrorKind::InvalidConfig, "grid parameter '" + key + "' has no values");
    ExperimentConfig probe = base;
    apply_grid_value(probe, key, values.front());
  }

  // Enumerate cells in lexicographic key order, repeats innermost.
  std::vector<ExperimentConfig> cells;
  std::vector<std::size_t> idx(grid.size(), 0);
  while (true) {
    ExperimentConfig cell = base;
    cell.grid_point.clear();
    std::size_t k = 0;
    for (const auto& [key, values] : grid) {
      const double v = values[idx[k++]];
      apply_grid_value(cell, key, v);
      cell.grid_point[key] = v;
    }
    for (long r = 0; r < std::max<long>(1, base.plan.n_repeats); ++r) {
      ExperimentConfig rep = cell;
      rep.repeat = r;
      rep.fit.rng_seed = derive_seed(base.seed, {std::hash<std::string>{}(grid_label(cell.grid_point)),
                                                 static_cast<std::uint64_t>(r)});
      cells.push_back(std::move(rep));
    }
    std::size_t pos = grid.size();
    bool done = true;
    auto it = grid.rbegin();
    while (pos-- > 0) {
      if (++idx[pos] < it->second.size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
      ++it;
    }
    if (done) break;
  }

  std::vector<RunRecord> out(cells.size());
  auto run_cell = [&](std::size_t i) {
    try {
      out[i] = run_experiment(cells[i]);
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.config = cells[i];
      failed.run_id = make_run_id(cells[i]);
      failed.error = e.what();
      out[i] = std::move(failed);
    }
  };
  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < workers; ++t) {
      jobs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < cells.size(); i += static_cast<std::size_t>(workers)) {
          run_cell(i);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::SchemaMismatch, "no records to summarize");
  std::map<std::string, std::vector<const RunRecord*>> groups;
  std::vector<std::string> order;
  for (const auto& r : records) {
    std::string key = std::string(to_string(r.config.algorithm));
    const std::string g = grid_label(r.config.grid_point);
    if (!g.empty()) key += "[" + g + "]";
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    const auto& first = records.front().config.grid_point;
    const auto& here = r.config.grid_point;
    if (first.size() != here.size() ||
        !std::equal(first.begin(), first.end(), here.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw Error(ErrorKind::SchemaMismatch, "record " + r.run_id + " has different grid keys");
    }
    it->second.push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& group = groups[key];
    SummaryRow row;
    row.key = key;
    row.algorithm = group.front()->config.algorithm;
    row.grid_point = group.front()->config.grid_point;
    std::vector<double> errors;
    double iter_conv = 0.0;
    long n_conv = 0;
    double iter_scored = 0.0;
    double mse_mean = 0.0;
    double mse_cov = 0.0;
    long n_mse = 0;
    for (const RunRecord* r : group) {
      ++row.runs;
      if (!r->error.empty()) {
        ++row.failed;
        continue;
      }
      errors.push_back(r->test_error);
      if (r->diverged()) {
        ++row.divergences;
        iter_scored += r->config.fit.max_iters;
      } else {
        iter_conv += r->iterations_to_converge;
        iter_scored += r->iterations_to_converge;
        ++n_conv;
      }
      if (r->moment_error) {
        mse_mean += r->moment_error->mse_mean;
        mse_cov += r->moment_error->mse_cov;
        ++n_mse;
      }
    }
    const auto n_ok = static_cast<double>(errors.size());
    if (!errors.empty()) {
      row.mean_test_error = std::accumulate(errors.begin(), errors.end(), 0.0) / n_ok;
      double ss = 0.0;
      for (double e : errors) ss += (e - row.mean_test_error) * (e - row.mean_test_error);
      row.stddev_test_error = errors.size() > 1 ? std::sqrt(ss / (n_ok - 1.0)) : 0.0;
      row.mean_iterations_scored = iter_scored / n_ok;
    }
    row.mean_iterations_converged =
        n_conv > 0 ? iter_conv / static_cast<double>(n_conv) : std::numeric_limits<double>::quiet_NaN();
    if (n_mse > 0) {
      row.mean_mse_mean = mse_mean / static_cast<double>(n_mse);
      row.mean_mse_cov = mse_cov / static_cast<double>(n_mse);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json record_json(const RunRecord& r) {
  const auto& c = r.config;
  ordered_json j;
  j["run_id"] = r.run_id;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["dataset"] = c.dataset.kind == SourceKind::Csv ? c.dataset.path : std::string(to_string(c.dataset.kind));
  j["kernel"] = c.kernel.kind == KernelKind::Linear ? "linear" : "rbf";
  j["width"] = r.width_used;
  j["epsilon"] = r.epsilon_used;
  j["power_u"] = c.algorithm == Algorithm::Pep ? ordered_json(c.power_u) : ordered_json(nullptr);
  j["penalty_c"] = c.algorithm == Algorithm::Rep ? ordered_json(c.penalty_c) : ordered_json(nullptr);
  j["removal"] = std::string(to_string(c.fit.removal));
  j["skip_policy"] = std::string(to_string(c.fit.skip_policy));
  j["flip_rate"] = c.flip_rate;
  j["standardize"] = c.dataset.standardize;
  j["cv_folds"] = c.cv_width_multipliers.empty() ? 0 : c.cv_folds;
  std::string cv_grid;
  for (double m : c.cv_width_multipliers) cv_grid += (cv_grid.empty() ? "" : ";") + ordered_json(m).dump();
  j["cv_grid"] = cv_grid;
  j["repeat"] = c.repeat;
  j["seed"] = c.seed;
  j["grid"] = grid_label(c.grid_point);
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["verdict"] = r.error.empty() ? std::string(to_string(r.verdict)) : std::string("error");
  j["iterations"] = static_cast<long>(r.trace.size());
  j["iterations_to_converge"] = r.iterations_to_converge;
  j["final_R"] = r.trace.empty() ? ordered_json(nullptr) : finite_or_null(r.trace.back());
  j["test_error"] = r.error.empty() ? ordered_json(r.test_error) : ordered_json(nullptr);
  j["mse_mean"] = r.moment_error ? ordered_json(r.moment_error->mse_mean) : ordered_json(nullptr);
  j["mse_cov"] = r.moment_error ? ordered_json(r.moment_error->mse_cov) : ordered_json(nullptr);
  j["oracle_ess"] = r.moment_error ? ordered_json(r.oracle_ess) : ordered_json(nullptr);
  j["skipped_invalid_cavity"] = r.events.invalid_cavity;
  j["skipped_nonpositive_variance"] = r.events.nonpositive_variance;
  j["skipped_singular_update"] = r.events.singular_update;
  j["skipped_line_search"] = r.events.line_search_failure;
  j["clamped"] = r.events.clamped;
  j["max_b"] = r.relax_b.size() > 0 ? r.relax_b.maxCoeff() : 0.0;
  j["error"] = r.error;
  return j;
}

ordered_json summary_json(const SummaryRow& s) {
  ordered_json j;
  j["key"] = s.key;
  j["algorithm"] = std::string(to_string(s.algorithm));
  j["grid"] = grid_label(s.grid_point);
  j["runs"] = s.runs;
  j["failed"] = s.failed;
  j["divergences"] = s.divergences;
  j["mean_test_error"] = s.mean_test_error;
  j["stddev_test_error"] = s.stddev_test_error;
  j["mean_iterations_converged"] = finite_or_null(s.mean_iterations_converged);
  j["mean_iterations_scored"] = s.mean_iterations_scored;
  j["mean_mse_mean"] = optional_number(s.mean_mse_mean);
  j["mean_mse_cov"] = optional_number(s.mean_mse_cov);
  return j;
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_number() || v.is_boolean()) return v.dump();
  std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  return out;
}

void write_table(const std::vector<ordered_json>& rows, const std::vector<std::string>& header,
                 OutputFormat format, const std::string& path) {
  auto out = open_out(path);
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) arr.push_back(r);
    out << arr.dump(2) << '\n';
  } else {
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& r : rows) {
      std::size_t k = 0;
      for (const auto& h : header) out << (k++ ? "," : "") << csv_cell(r.at(h));
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

std::vector<std::string> keys_of(const ordered_json& j) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  return keys;
}

}  // namespace

void emit_records(const std::vector<RunRecord>& records, OutputFormat format,
                  const std::string& path) {
  std::vector<ordered_json> rows;
  for (const auto& r : records) rows.push_back(record_json(r));
  write_table(rows, keys_of(record_json(RunRecord{})), format, path);
}

void emit_summary(const std::vector<SummaryRow>& rows, OutputFormat format,
                  const std::string& path) {
  std::vector<ordered_json> out;
  for (const auto& r : rows) out.push_back(summary_json(r));
  write_table(out, keys_of(summary_json(SummaryRow{})), format, path);
}

void emit_traces(const std::vector<RunRecord>& records, const std::string& path) {
  auto out = open_out(path);
  out << "run_id,iter,R\n";
  char buf[64];
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", r.trace[k]);
      out << csv_cell(r.run_id) << ',' << (k + 1) << ',' << buf << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

void emit_sites(const std::vector<RunRecord>& records, const std::string& path) {
  auto out = open_out(path);
  out << "run_id,site,m,precision,b\n";
  char buf[160];
  for (const auto& r : records) {
    for (Eigen::Index i = 0; i < r.site_m.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.site_m[i], r.site_precision[i], r.relax_b[i]);
      out << csv_cell(r.run_id) << ',' << i << ',' << buf << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

void emit_metadata(const std::vector<RunRecord>& records, const std::string& path) {
  ordered_json meta;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["written_unix_seconds"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  ordered_json runs = ordered_json::array();
  for (const auto& r : records) {
    ordered_json j;
    j["run_id"] = r.run_id;
    j["wall_seconds"] = r.wall_seconds;
    runs.push_back(j);
  }
  meta["runs"] = runs;
  auto out = open_out(path);
  out << meta.dump(2) << '\n';
}

}  // namespace repgp
