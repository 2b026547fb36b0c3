// Command-line front end: `repgp fit` runs one configuration, `repgp grid`
// sweeps a parameter grid and writes records, summary, traces and sites.

#include "repgp/error.hpp"
#include "repgp/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace repgp;

struct CliArgs {
  std::string algorithm = "rep";
  std::string kernel = "rbf";
  double width = 1.0;
  std::string cv_widths;
  std::optional<double> epsilon;
  double power = 0.8;
  double penalty_c = 20.0;
  std::string dataset = "builtin:mixture";
  std::string label_column = "label";
  std::string positive_label = "1";
  std::string split_file;
  bool flip_test = false;
  bool no_standardize = false;
  double flip_rate = 0.0;
  long n_train = 400;
  long n_test = 2000;
  long repeats = 1;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tol = 1e-3;
  long oracle_samples = 0;
  std::string removal = "paper";
  std::string skip = "skip";
  std::string out_dir = ".";
  std::string format = "json";
  std::vector<std::string> grid;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, "bad number '" + item + "' in " + what);
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, what + " has no values");
  return out;
}

ExperimentConfig build_config(const CliArgs& a) {
  ExperimentConfig c;
  c.algorithm = parse_algorithm(a.algorithm);
  if (a.kernel == "linear") {
    c.kernel = KernelSpec::linear();
  } else if (a.kernel == "rbf") {
    c.kernel = KernelSpec::rbf(a.width);
    if (!a.cv_widths.empty()) c.cv_width_multipliers = parse_list(a.cv_widths, "--cv-widths");
  } else {
    throw Error(ErrorKind::InvalidConfig, "unknown kernel '" + a.kernel + "'");
  }
  c.epsilon = a.epsilon;
  c.power_u = a.power;
  c.penalty_c = a.penalty_c;
  if (a.dataset == "builtin:toy5") {
    c.dataset.kind = SourceKind::Toy5;
  } else if (a.dataset == "builtin:mixture") {
    c.dataset.kind = SourceKind::Mixture;
  } else {
    c.dataset.kind = SourceKind::Csv;
    c.dataset.path = a.dataset;
  }
  c.dataset.label_column = a.label_column;
  c.dataset.positive_label = a.positive_label;
  c.dataset.split_file = a.split_file;
  c.dataset.flip_test = a.flip_test;
  c.dataset.standardize = !a.no_standardize;
  c.flip_rate = a.flip_rate;
  c.plan = SplitPlan{a.n_train, a.n_test, a.repeats, a.seed};
  c.seed = a.seed;
  c.fit.max_iters = a.max_iters;
  c.fit.tol = a.tol;
  c.fit.power_u = a.power;
  c.fit.penalty_c = a.penalty_c;
  c.fit.rng_seed = a.seed;
  c.fit.removal = a.removal == "division" ? RelaxationRemoval::Division : RelaxationRemoval::Paper;
  c.fit.skip_policy = a.skip == "clamp" ? SkipPolicy::ClampVariance : SkipPolicy::SkipSite;
  if (a.oracle_samples > 0) {
    OracleOptions o;
    o.n_samples = a.oracle_samples;
    o.seed = a.seed;
    c.oracle = o;
  }
  return c;
}

ParameterGrid parse_grid(const std::vector<std::string>& specs) {
  ParameterGrid grid;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::InvalidConfig, "grid entry '" + s + "' is not key=v1,v2,...");
    }
    const std::string key = s.substr(0, eq);
    grid[key] = eq + 1 < s.size() ? parse_list(s.substr(eq + 1), key) : std::vector<double>{};
    if (grid[key].empty()) throw Error(ErrorKind::InvalidConfig, "grid parameter '" + key + "' has no values");
  }
  return grid;
}

int thread_budget() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("REPGP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void add_common(CLI::App* cmd, CliArgs& a) {
  cmd->add_option("--algorithm", a.algorithm, "ep, pep or rep")
      ->check(CLI::IsMember({"ep", "pep", "rep"}));
  cmd->add_option("--kernel", a.kernel, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--width", a.width, "rbf lengthscale");
  cmd->add_option("--cv-widths", a.cv_widths,
                  "comma-separated multiples of the median distance to cross-validate");
  cmd->add_option("--epsilon", a.epsilon, "labeling error in the likelihood (default: flip rate)");
  cmd->add_option("--power", a.power, "power u for pep");
  cmd->add_option("--penalty-c", a.penalty_c, "l1 weight c for rep");
  cmd->add_option("--dataset", a.dataset, "builtin:toy5, builtin:mixture or a csv path");
  cmd->add_option("--label-column", a.label_column);
  cmd->add_option("--positive-label", a.positive_label);
  cmd->add_option("--split-file", a.split_file, "train index lists, one line per repeat");
  cmd->add_flag("--flip-test", a.flip_test, "also flip test labels");
  cmd->add_flag("--no-standardize", a.no_standardize);
  cmd->add_option("--flip-rate", a.flip_rate);
  cmd->add_option("--n-train", a.n_train);
  cmd->add_option("--n-test", a.n_test);
  cmd->add_option("--repeats", a.repeats);
  cmd->add_option("--seed", a.seed);
  cmd->add_option("--max-iters", a.max_iters);
  cmd->add_option("--tol", a.tol);
  cmd->add_option("--oracle-samples", a.oracle_samples, "0 disables the oracle");
  cmd->add_option("--removal", a.removal)->check(CLI::IsMember({"paper", "division"}));
  cmd->add_option("--skip-policy", a.skip)->check(CLI::IsMember({"skip", "clamp"}));
  cmd->add_option("--out-dir", a.out_dir);
  cmd->add_option("--format", a.format)->check(CLI::IsMember({"json", "csv"}));
}

void write_outputs(const std::vector<RunRecord>& records, const CliArgs& a, bool with_summary) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + a.out_dir + ": " + ec.message());
  const OutputFormat fmt = a.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  const fs::path dir(a.out_dir);
  emit_records(records, fmt, (dir / ("records." + a.format)).string());
  if (with_summary) emit_summary(summarize(records), fmt, (dir / ("summary." + a.format)).string());
  emit_traces(records, (dir / "traces.csv").string());
  emit_sites(records, (dir / "sites.csv").string());
  emit_metadata(records, (dir / "metadata.json").string());
}

bool is_config_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidPower:
    case ErrorKind::MissingColumn:
    case ErrorKind::PlanExceedsData:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process classification with EP, power EP and relaxed EP"};
  app.require_subcommand(1);
  CliArgs fit_args;
  CliArgs grid_args;
  auto* fit_cmd = app.add_subcommand("fit", "run one configuration");
  add_common(fit_cmd, fit_args);
  auto* grid_cmd = app.add_subcommand("grid", "sweep a parameter grid");
  add_common(grid_cmd, grid_args);
  grid_cmd->add_option("--grid", grid_args.grid, "key=v1,v2,... (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit_cmd) {
      const ExperimentConfig config = build_config(fit_args);
      config.validate();
      std::vector<RunRecord> records;
      for (long r = 0; r < std::max<long>(1, config.plan.n_repeats); ++r) {
        ExperimentConfig run = config;
        run.repeat = r;
        records.push_back(run_experiment(run));
        const auto& rec = records.back();
        std::cout << rec.run_id << ' ' << to_string(rec.verdict) << " sweeps=" << rec.trace.size()
                  << " test_error=" << rec.test_error;
        if (rec.moment_error) {
          std::cout << " mse_mean=" << rec.moment_error->mse_mean
                    << " mse_cov=" << rec.moment_error->mse_cov;
        }
        std::cout << '\n';
      }
      write_outputs(records, fit_args, records.size() > 1);
    } else {
      const ExperimentConfig config = build_config(grid_args);
      config.validate();
      const ParameterGrid grid = parse_grid(grid_args.grid);
      const auto records = run_grid(config, grid, thread_budget());
      write_outputs(records, grid_args, true);
      long failed = 0;
      for (const auto& r : records) failed += !r.error.empty();
      std::cout << records.size() << " runs, " << failed << " failed\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_config_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
