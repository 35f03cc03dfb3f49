// Command-line front end: data generation, attacks, single fits and full
// experiment sweeps.
//
// Exit codes: 0 success, 1 configuration error, 2 data error,
// 3 a projection did not converge (outputs are still written).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robustreg/batch.hpp"
#include "robustreg/data_io.hpp"
#include "robustreg/errors.hpp"
#include "robustreg/experiments.hpp"
#include "robustreg/metrics.hpp"
#include "robustreg/projection.hpp"

namespace fs = std::filesystem;
using namespace robustreg;

namespace {

constexpr int kConfigError = 1;
constexpr int kDataError = 2;
constexpr int kNotConverged = 3;

// Flags that mirror config keys. Values given on the command line override
// the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::vector<std::string> raw;  // --set section.key=value

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help + " (" + key + ")");
  }

  void apply(Config& cfg) const {
    for (const auto& kv : raw) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("", "--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : values) cfg.set(k, v);
  }
};

void bind_common(CLI::App* app, Overrides& o) {
  // -h would collide with the bandwidth flag --h.
  app->set_help_flag("--help", "print this help and exit");
  o.bind(app, "--methods", "experiment.methods", "comma-separated methods");
  o.bind(app, "--attacks", "experiment.attacks", "comma-separated attack specs");
  o.bind(app, "--q", "experiment.q", "budget schedule");
  o.bind(app, "--q-fraction", "experiment.q_fraction", "attacked fraction of the training split");
  o.bind(app, "--n", "data.n", "sample size");
  o.bind(app, "--dim", "data.dim", "dimension");
  o.bind(app, "--target", "data.target", "regression function");
  o.bind(app, "--sigma", "data.sigma", "noise level");
  o.bind(app, "--data-path", "data.path", "CSV file");
  o.bind(app, "--target-column", "data.target_column", "CSV label column");
  o.bind(app, "--splits", "data.splits", "number of train/test splits");
  o.bind(app, "--h", "estimator.h", "bandwidth");
  o.bind(app, "--T", "estimator.T", "Huber threshold");
  o.bind(app, "--M", "estimator.M", "clipping level");
  o.bind(app, "--kernel", "estimator.kernel", "kernel name");
  o.bind(app, "--groups", "estimator.groups", "median-of-means groups");
  o.bind(app, "--trim", "estimator.trim", "trimmed fraction per side");
  o.bind(app, "--L", "projection.L", "Lipschitz constant");
  o.bind(app, "--grid", "projection.grid", "grid nodes per axis");
  o.bind(app, "--knn", "projection.knn", "neighbours for scattered projection");
  o.bind(app, "--n-eval", "eval.n_eval", "Monte Carlo evaluation points");
  o.bind(app, "--linf-resolution", "eval.linf_resolution", "sup-norm grid nodes per axis");
  o.bind(app, "--repeats", "run.repeats", "repeats per cell");
  o.bind(app, "--seed", "run.seed", "base seed");
  o.bind(app, "--workers", "run.workers", "worker threads");
  app->add_option("--set", o.raw, "override any setting: section.key=value");
}

Config load_config(const std::string& path, const Overrides& o) {
  Config cfg = path.empty() ? Config{} : Config::load(path);
  o.apply(cfg);
  return cfg;
}

fs::path output_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output.empty()) return cfg.output;
  if (const char* env = std::getenv("ROBUSTREG_OUTPUT_DIR"); env && *env) return env;
  return fs::path("results") / cfg.name;
}

std::unique_ptr<PointwiseEstimator> make_estimator(const ExperimentConfig& cfg, Method m,
                                                   const Dataset& data, bool* converged) {
  const Kernel kernel = Kernel::parse(cfg.kernel);
  *converged = true;
  switch (m) {
    case Method::nw:
      return std::make_unique<NadarayaWatsonEstimator>(data, cfg.huber.h, kernel, cfg.huber.M);
    case Method::mom:
      return std::make_unique<MedianOfMeansEstimator>(data, cfg.huber.h, kernel, cfg.huber.M,
                                                      cfg.groups, cfg.seed);
    case Method::trimmed:
      return std::make_unique<TrimmedMeanEstimator>(data, cfg.huber.h, kernel, cfg.huber.M, cfg.trim);
    case Method::huber:
      return std::make_unique<HuberEstimator>(data, cfg.huber, kernel);
    case Method::corrected: {
      if (data.dim() > 3) throw ConfigError("experiment.methods", "grid correction supports at most 3 dimensions");
      const HuberEstimator initial(data, cfg.huber, kernel);
      auto c = std::make_unique<CorrectedEstimator>(initial, Grid::unit_cube(data.dim(), cfg.grid),
                                                    ProjectionParams{cfg.L, cfg.proj_tol, cfg.max_sweeps});
      *converged = c->converged();
      return c;
    }
  }
  return nullptr;
}

// Synthetic settings only need to be valid for the subcommands that use a
// synthetic sample; loose configs (no budgets etc.) are fine elsewhere.
ExperimentConfig loose_config(Config cfg) {
  if (!cfg.has("experiment.q")) cfg.set("experiment.q", "0");
  if (!cfg.has("experiment.attacks")) cfg.set("experiment.attacks", "none");
  return ExperimentConfig::from(cfg);
}

struct Args {
  std::string config;
  std::string out;
  std::string data;
  std::string indices;
  std::string points;
  std::string method = "huber";
  std::string attack;
  std::string summary;
  std::string cell;
  std::size_t q = 0;
  std::size_t resolution = 0;
  Overrides overrides;
};

int cmd_generate(const Args& a) {
  const auto cfg = loose_config(load_config(a.config, a.overrides));
  const auto data = generate_synthetic(cfg.n, cfg.dim, TargetFunction::parse(cfg.target), {cfg.sigma},
                                       derive_seed(cfg.seed, {"data", "0"}));
  write_dataset_csv(a.out, data);
  return 0;
}

int cmd_attack(const Args& a) {
  const auto cfg = loose_config(load_config(a.config, a.overrides));
  const AttackSpec spec = [&] {
    try {
      return AttackSpec::parse(a.attack);
    } catch (const ConfigError& e) {
      throw ConfigError("--attack", e.what());
    }
  }();
  const Dataset data = read_dataset_csv(a.data);
  if (a.q > data.size()) throw ConfigError("--budget", "budget exceeds the sample size");
  const auto result = apply_attack(data, spec, a.q, derive_seed(cfg.seed, {"attack", a.attack, std::to_string(a.q), "0"}));
  write_dataset_csv(a.out, result.dataset);
  if (!a.indices.empty()) write_indices_csv(a.indices, result.attacked);
  if (result.overlap > 0) std::cerr << "note: " << result.overlap << " samples claimed by both centers\n";
  return 0;
}

int cmd_fit(const Args& a) {
  const auto cfg = loose_config(load_config(a.config, a.overrides));
  const Dataset data = read_dataset_csv(a.data);
  bool converged = true;
  const auto est = make_estimator(cfg, parse_method(a.method), data, &converged);
  const PointSet points = a.points.empty()
                              ? PointSet::regular_grid(data.dim(), a.resolution > 0 ? a.resolution
                                                                                    : default_linf_resolution(data.dim()))
                              : read_dataset_csv(a.points).points();
  const auto pred = predict_parallel(*est, points);

  // Same layout as the data files: x1..xd plus the prediction as y.
  write_dataset_csv(a.out, Dataset(points, pred));
  return converged ? 0 : kNotConverged;
}

int cmd_eval(const Args& a) {
  const auto cfg = loose_config(load_config(a.config, a.overrides));
  const Dataset data = read_dataset_csv(a.data);
  const auto truth = TargetFunction::parse(cfg.target);
  if (!truth.supports_dim(data.dim())) throw ConfigError("data.target", "dimension mismatch with the data");
  bool converged = true;
  const auto est = make_estimator(cfg, parse_method(a.method), data, &converged);
  const double rmse = eval_l2(*est, truth, cfg.n_eval, derive_seed(cfg.seed, {"eval", "0"}));
  const std::size_t res = cfg.linf_resolution > 0 ? cfg.linf_resolution : default_linf_resolution(data.dim());
  const double linf = eval_linf(*est, truth, res);
  std::cout << "method,rmse,linf\n" << a.method << ',' << format_double(rmse) << ',' << format_double(linf) << '\n';
  return converged ? 0 : kNotConverged;
}

int cmd_sweep(const Args& a) {
  const auto cfg = ExperimentConfig::from(load_config(a.config, a.overrides));
  if (!a.cell.empty()) {
    // method,attack,q,repeat; the attack is referenced by its configured label.
    std::vector<std::string> f;
    std::stringstream ss(a.cell);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(part);
    if (f.size() != 4) throw ConfigError("--cell", "expected method,attack,q,repeat");
    const NamedAttack* attack = nullptr;
    for (const auto& na : cfg.attacks)
      if (na.label == f[1]) attack = &na;
    if (!attack) throw ConfigError("--cell", "attack '" + f[1] + "' is not in the config");
    std::size_t q = 0, rep = 0;
    try {
      q = std::stoul(f[2]);
      rep = std::stoul(f[3]);
    } catch (const std::logic_error&) {
      throw ConfigError("--cell", "q and repeat must be integers");
    }
    const RunRow row = run_cell(cfg, parse_method(f[0]), *attack, q, rep);
    std::cout << runs_csv_header() << '\n' << format_run_row(row) << '\n';
    return row.converged ? 0 : kNotConverged;
  }
  const auto table = run_sweep(cfg);
  const fs::path dir = output_dir(a.out, cfg);
  write_sweep(dir, table);
  emit_plotdata(summarize(table), dir / "plotdata");
  std::cerr << "wrote " << table.rows.size() << " runs to " << dir.string() << '\n';
  return table.all_converged ? 0 : kNotConverged;
}

int cmd_realdata(const Args& a) {
  Config raw = load_config(a.config, a.overrides);
  if (!a.data.empty()) raw.set("data.path", a.data);
  const auto cfg = ExperimentConfig::from(raw);
  const auto report = run_realdata(cfg);
  const fs::path dir = output_dir(a.out, cfg);
  write_realdata(dir, report);
  std::cout << "attack,clean_nw";
  for (const auto& m : report.methods) std::cout << ',' << m;
  std::cout << '\n';
  for (const auto& att : report.attacks) {
    std::cout << att << ',' << format_double(report.median_rmse("none", "nw"));
    for (const auto& m : report.methods) std::cout << ',' << format_double(report.median_rmse(att, m));
    std::cout << '\n';
  }
  std::cerr << "(medians over " << cfg.splits << " splits; table.csv holds means)\n";
  return report.all_converged ? 0 : kNotConverged;
}

std::vector<SummaryRow> read_summary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("method,attack,q,N,repeats,mean_rmse,mean_linf", 0) != 0)
    throw DataError(path.string() + ": not a sweep summary");
  std::vector<SummaryRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 9 fields");
    try {
      rows.push_back({f[0], f[1], std::stoul(f[2]), std::stoul(f[3]), std::stoul(f[4]), std::stod(f[5]),
                      std::stod(f[6]), std::stod(f[7]), std::stod(f[8])});
    } catch (const std::logic_error&) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

int cmd_plotdata(const Args& a) {
  const auto files = emit_plotdata(read_summary(a.summary), a.out);
  for (const auto& f : files) std::cout << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust nonparametric regression under label poisoning"};
  app.set_help_flag("-h,--help", "print this help and exit");
  app.require_subcommand(1);
  Args a;

  auto* gen = app.add_subcommand("generate", "draw a synthetic sample");
  gen->add_option("-c,--config", a.config, "config file");
  gen->add_option("-o,--out", a.out, "output CSV")->required();
  bind_common(gen, a.overrides);

  auto* att = app.add_subcommand("attack", "poison the labels of a sample");
  att->add_option("-c,--config", a.config, "config file (seed)");
  att->add_option("-d,--data", a.data, "input CSV")->required();
  att->add_option("-a,--attack", a.attack, "attack spec, e.g. concentrated:10")->required();
  att->add_option("--budget", a.q, "number of attacked samples")->required();
  att->add_option("-o,--out", a.out, "output CSV")->required();
  att->add_option("--indices", a.indices, "write attacked indices here");
  bind_common(att, a.overrides);

  auto* fit = app.add_subcommand("fit", "fit one estimator and write its predictions");
  fit->add_option("-c,--config", a.config, "config file");
  fit->add_option("-d,--data", a.data, "training CSV")->required();
  fit->add_option("-m,--method", a.method, "nw, mom, trimmed, huber or corrected");
  fit->add_option("--points", a.points, "CSV of query points (x1..xd[,y])");
  fit->add_option("--resolution", a.resolution, "regular grid nodes per axis when --points is absent");
  fit->add_option("-o,--out", a.out, "output CSV")->required();
  bind_common(fit, a.overrides);

  auto* ev = app.add_subcommand("eval", "fit one estimator and report its risk against the true function");
  ev->add_option("-c,--config", a.config, "config file");
  ev->add_option("-d,--data", a.data, "training CSV")->required();
  ev->add_option("-m,--method", a.method, "nw, mom, trimmed, huber or corrected");
  bind_common(ev, a.overrides);

  auto* sw = app.add_subcommand("sweep", "run every (method, attack, q, repeat) cell of a config");
  sw->add_option("-c,--config", a.config, "config file")->required();
  sw->add_option("-o,--out", a.out, "output directory (default: run.output, $ROBUSTREG_OUTPUT_DIR)");
  sw->add_option("--cell", a.cell, "run one cell only: method,attack,q,repeat");
  bind_common(sw, a.overrides);

  auto* rd = app.add_subcommand("realdata", "split, attack and score a CSV dataset");
  rd->add_option("-c,--config", a.config, "config file")->required();
  rd->add_option("-d,--data", a.data, "CSV path (overrides data.path)");
  rd->add_option("-o,--out", a.out, "output directory");
  bind_common(rd, a.overrides);

  auto* pd = app.add_subcommand("plotdata", "turn a sweep summary into per-metric plot tables");
  pd->add_option("-s,--summary", a.summary, "summary.csv from a sweep")->required();
  pd->add_option("-o,--out", a.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) return cmd_generate(a);
    if (*att) return cmd_attack(a);
    if (*fit) return cmd_fit(a);
    if (*ev) return cmd_eval(a);
    if (*sw) return cmd_sweep(a);
    if (*rd) return cmd_realdata(a);
    if (*pd) return cmd_plotdata(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
