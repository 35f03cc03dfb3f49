#include "robustreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "robustreg/batch.hpp"
#include "robustreg/data_io.hpp"
#include "robustreg/errors.hpp"
#include "robustreg/metrics.hpp"
#include "robustreg/projection.hpp"
#include "robustreg/rng.hpp"
#include "robustreg/stats.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace robustreg {

std::string method_name(Method m) {
  switch (m) {
    case Method::nw:
      return "nw";
    case Method::mom:
      return "mom";
    case Method::trimmed:
      return "trimmed";
    case Method::huber:
      return "huber";
    case Method::corrected:
      return "corrected";
  }
  return {};
}

Method parse_method(const std::string& name) {
  if (name == "nw") return Method::nw;
  if (name == "mom") return Method::mom;
  if (name == "trimmed") return Method::trimmed;
  if (name == "huber") return Method::huber;
  if (name == "corrected") return Method::corrected;
  throw ConfigError("experiment.methods", "unknown method '" + name + "'");
}

std::vector<std::size_t> parse_q_schedule(const std::string& text) {
  const std::string key = "experiment.q";
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    std::string rest = s.substr(std::min(used, s.size()));
    rest.erase(0, rest.find_first_not_of(" \t"));
    if (used == 0 || !rest.empty() || v < 0) throw ConfigError(key, "bad budget '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> f;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) f.push_back(part);
    if (f.size() != 3) throw ConfigError(key, "expected start:stop:step, got '" + text + "'");
    const std::size_t a = number(f[0]), b = number(f[1]), step = number(f[2]);
    if (step == 0 || b < a) throw ConfigError(key, "empty or endless range '" + text + "'");
    for (std::size_t q = a; q <= b; q += step) out.push_back(q);
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part.erase(0, part.find_first_not_of(" \t"));
      if (!part.empty()) out.push_back(number(part));
    }
  }
  if (out.empty()) throw ConfigError(key, "empty budget schedule");
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string> parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined += '|';
  }
  return splitmix64(base ^ fnv1a64(joined));
}

double h_default(std::size_t n, std::size_t dim, std::size_t q) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  const double N = static_cast<double>(n), d = static_cast<double>(dim);
  return std::max(std::pow(static_cast<double>(q) / N, 1.0 / (d + 1.0)), std::pow(N, -1.0 / (d + 2.0)));
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment.name",      "experiment.methods",    "experiment.attacks",
    "experiment.q",         "experiment.q_fraction", "data.source",
    "data.n",               "data.dim",              "data.target",
    "data.sigma",           "data.path",             "data.target_column",
    "data.train_fraction",  "data.splits",           "estimator.h",
    "estimator.T",          "estimator.M",           "estimator.kernel",
    "estimator.groups",     "estimator.trim",        "projection.L",
    "projection.grid",      "projection.tol",        "projection.max_sweeps",
    "projection.knn",       "eval.n_eval",           "eval.linf_resolution",
    "run.repeats",          "run.seed",              "run.workers",
    "run.output",
};

template <class F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (!e.key().empty()) throw;
    throw ConfigError(key, e.what());
  } catch (const DataError& e) {
    throw ConfigError(key, e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const Config& cfg) {
  cfg.require_known(kKnownKeys);
  ExperimentConfig c;
  c.name = cfg.get_string("experiment.name", c.name);

  const std::string source = cfg.get_string("data.source", "synthetic");
  if (source != "synthetic" && source != "csv")
    throw ConfigError("data.source", "expected 'synthetic' or 'csv'");
  c.synthetic = source == "synthetic";
  c.n = cfg.get_size("data.n", c.n);
  c.dim = cfg.get_size("data.dim", c.dim);
  c.target = cfg.get_string("data.target", c.target);
  c.sigma = cfg.get_double("data.sigma", c.sigma);
  c.csv_path = cfg.get_string("data.path", "");
  c.target_column = cfg.get_string("data.target_column", "");
  c.train_fraction = cfg.get_double("data.train_fraction", c.train_fraction);
  c.splits = cfg.get_size("data.splits", c.splits);

  const auto methods = cfg.has("experiment.methods")
                           ? cfg.get_list("experiment.methods")
                           : std::vector<std::string>{"nw", "mom", "trimmed", "huber", "corrected"};
  for (const auto& m : methods) c.methods.push_back(parse_method(m));
  const auto attacks = cfg.has("experiment.attacks")
                           ? cfg.get_list("experiment.attacks")
                           : std::vector<std::string>{"random", "one_directional", "concentrated"};
  // Entries are "spec" or "label=spec"; the label names output files and seeds.
  for (const auto& a : attacks) {
    const auto eq = a.find('=');
    std::string label = eq == std::string::npos ? a : a.substr(0, eq);
    const std::string spec = eq == std::string::npos ? a : a.substr(eq + 1);
    label.erase(label.find_last_not_of(" \t") + 1);
    if (label.empty()) throw ConfigError("experiment.attacks", "empty attack label in '" + a + "'");
    c.attacks.push_back({label, keyed("experiment.attacks", [&] { return AttackSpec::parse(spec); })});
  }
  if (cfg.has("experiment.q")) c.q_values = parse_q_schedule(cfg.get_string("experiment.q"));
  c.q_fraction = cfg.get_double("experiment.q_fraction", c.q_fraction);

  c.huber.h = cfg.get_double("estimator.h", c.huber.h);
  c.huber.T = cfg.get_double("estimator.T", c.huber.T);
  c.huber.M = cfg.get_double("estimator.M", c.huber.M);
  c.kernel = cfg.get_string("estimator.kernel", c.kernel);
  c.groups = cfg.get_size("estimator.groups", c.groups);
  c.trim = cfg.get_double("estimator.trim", c.trim);

  c.L = cfg.get_double("projection.L", c.L);
  c.grid = cfg.get_size("projection.grid", c.grid);
  c.proj_tol = cfg.get_double("projection.tol", c.proj_tol);
  c.max_sweeps = cfg.get_size("projection.max_sweeps", c.max_sweeps);
  c.knn = cfg.get_size("projection.knn", c.knn);

  c.n_eval = cfg.get_size("eval.n_eval", c.n_eval);
  c.linf_resolution = cfg.get_size("eval.linf_resolution", c.linf_resolution);

  c.repeats = cfg.get_size("run.repeats", c.repeats);
  c.seed = cfg.get_u64("run.seed", c.seed);
  c.workers = cfg.get_size("run.workers", c.workers);
  c.output = cfg.get_string("run.output", "");
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("experiment.methods", "no methods selected");
  if (attacks.empty()) throw ConfigError("experiment.attacks", "no attacks selected");
  std::set<std::string> seen_m, seen_a;
  for (Method m : methods)
    if (!seen_m.insert(method_name(m)).second)
      throw ConfigError("experiment.methods", "duplicate method " + method_name(m));
  for (const auto& a : attacks)
    if (!seen_a.insert(a.label).second)
      throw ConfigError("experiment.attacks", "duplicate attack " + a.label);
  if (synthetic) {
    if (n < 1) throw ConfigError("data.n", "must be at least 1");
    if (dim < 1) throw ConfigError("data.dim", "must be at least 1");
    const auto t = keyed("data.target", [&] { return TargetFunction::parse(target); });
    if (!t.supports_dim(dim)) throw ConfigError("data.target", target + " is not defined for this dimension");
    if (!(sigma >= 0.0)) throw ConfigError("data.sigma", "must be non-negative");
    if (q_values.empty()) throw ConfigError("experiment.q", "missing budget schedule");
    for (std::size_t q : q_values)
      if (q > n) throw ConfigError("experiment.q", "budget " + std::to_string(q) + " exceeds data.n");
    if (dim > 3) {
      for (Method m : methods)
        if (m == Method::corrected)
          throw ConfigError("experiment.methods", "grid correction supports at most 3 dimensions");
    }
  } else {
    if (csv_path.empty()) throw ConfigError("data.path", "required for csv data");
    if (target_column.empty()) throw ConfigError("data.target_column", "required for csv data");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw ConfigError("data.train_fraction", "must lie strictly between 0 and 1");
    if (splits < 1) throw ConfigError("data.splits", "must be at least 1");
    if (!(q_fraction >= 0.0 && q_fraction <= 1.0))
      throw ConfigError("experiment.q_fraction", "must lie in [0, 1]");
  }
  keyed("estimator.h", [&] {
    huber.validate();
    return 0;
  });
  keyed("estimator.kernel", [&] { return Kernel::parse(kernel); });
  if (groups < 1) throw ConfigError("estimator.groups", "must be at least 1");
  if (!(trim >= 0.0 && trim < 0.5)) throw ConfigError("estimator.trim", "must lie in [0, 0.5)");
  if (!(L > 0.0)) throw ConfigError("projection.L", "must be positive");
  if (grid < 2) throw ConfigError("projection.grid", "must be at least 2");
  if (!(proj_tol > 0.0)) throw ConfigError("projection.tol", "must be positive");
  if (max_sweeps < 1) throw ConfigError("projection.max_sweeps", "must be at least 1");
  if (knn < 1) throw ConfigError("projection.knn", "must be at least 1");
  if (n_eval < 1) throw ConfigError("eval.n_eval", "must be at least 1");
  if (linf_resolution == 1) throw ConfigError("eval.linf_resolution", "must be at least 2");
  if (repeats < 1) throw ConfigError("run.repeats", "must be at least 1");
}

// ---------------------------------------------------------------------------
// Synthetic sweeps

namespace {

std::string q_str(std::size_t q) { return std::to_string(q); }

struct Job {
  std::size_t attack;
  std::size_t q;
  std::size_t repeat;
};

Dataset clean_data(const ExperimentConfig& cfg, std::size_t repeat) {
  return generate_synthetic(cfg.n, cfg.dim, TargetFunction::parse(cfg.target), {cfg.sigma},
                            derive_seed(cfg.seed, {"data", std::to_string(repeat)}));
}

std::uint64_t attack_seed(const ExperimentConfig& cfg, const std::string& label, std::size_t q,
                          std::size_t repeat) {
  return derive_seed(cfg.seed, {"attack", label, q_str(q), std::to_string(repeat)});
}

std::uint64_t run_seed(const ExperimentConfig& cfg, Method m, const std::string& label,
                       std::size_t q, std::size_t repeat) {
  return derive_seed(cfg.seed, {method_name(m), label, q_str(q), std::to_string(repeat)});
}

// Fits the configured methods on one attacked dataset. The Huber fit is shared
// with the corrected estimator.
class MethodSet {
 public:
  MethodSet(const ExperimentConfig& cfg, const Dataset& data) : cfg_(cfg), data_(data) {}

  /// Returns the estimator for `m`; `seed` feeds the median-of-means partition.
  const PointwiseEstimator& get(Method m, std::uint64_t seed, bool* converged) {
    *converged = true;
    const Kernel kernel = Kernel::parse(cfg_.kernel);
    const double h = cfg_.huber.h, M = cfg_.huber.M;
    switch (m) {
      case Method::nw:
        current_ = std::make_unique<NadarayaWatsonEstimator>(data_, h, kernel, M);
        return *current_;
      case Method::mom:
        current_ = std::make_unique<MedianOfMeansEstimator>(data_, h, kernel, M, cfg_.groups, seed);
        return *current_;
      case Method::trimmed:
        current_ = std::make_unique<TrimmedMeanEstimator>(data_, h, kernel, M, cfg_.trim);
        return *current_;
      case Method::huber:
        return huber();
      case Method::corrected: {
        const Grid grid = Grid::unit_cube(data_.dim(), cfg_.grid);
        auto c = std::make_unique<CorrectedEstimator>(
            huber(), grid, ProjectionParams{cfg_.L, cfg_.proj_tol, cfg_.max_sweeps});
        *converged = c->converged();
        current_ = std::move(c);
        return *current_;
      }
    }
    throw std::logic_error("unhandled method");
  }

  const HuberEstimator& huber() {
    if (!huber_) huber_ = std::make_unique<HuberEstimator>(data_, cfg_.huber, Kernel::parse(cfg_.kernel));
    return *huber_;
  }

 private:
  const ExperimentConfig& cfg_;
  const Dataset& data_;
  std::unique_ptr<HuberEstimator> huber_;
  std::unique_ptr<PointwiseEstimator> current_;
};

std::vector<RunRow> run_job(const ExperimentConfig& cfg, const Job& job,
                            const std::vector<Method>& methods) {
  const NamedAttack& attack = cfg.attacks[job.attack];
  const Dataset clean = clean_data(cfg, job.repeat);
  const auto attacked = apply_attack(clean, attack.spec, job.q,
                                     attack_seed(cfg, attack.label, job.q, job.repeat));
  const TargetFunction truth = TargetFunction::parse(cfg.target);
  const std::uint64_t eval_seed = derive_seed(cfg.seed, {"eval", std::to_string(job.repeat)});
  const std::size_t res =
      cfg.linf_resolution > 0 ? cfg.linf_resolution : default_linf_resolution(cfg.dim);

  MethodSet set(cfg, attacked.dataset);
  std::vector<RunRow> rows;
  for (Method m : methods) {
    RunRow row;
    row.method = method_name(m);
    row.attack = attack.label;
    row.q = job.q;
    row.repeat = job.repeat;
    row.n = cfg.n;
    row.h = cfg.huber.h;
    row.T = cfg.huber.T;
    row.M = cfg.huber.M;
    row.seed = run_seed(cfg, m, attack.label, job.q, job.repeat);
    const PointwiseEstimator& est = set.get(m, row.seed, &row.converged);
    row.rmse = eval_l2(est, truth, cfg.n_eval, eval_seed);
    row.linf = eval_linf(est, truth, res);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

}  // namespace

RunRow run_cell(const ExperimentConfig& cfg, Method method, const NamedAttack& attack,
                std::size_t q, std::size_t repeat) {
  ExperimentConfig one = cfg;
  one.attacks = {attack};
  return run_job(one, Job{0, q, repeat}, {method}).front();
}

SweepTable run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.synthetic) throw ConfigError("data.source", "sweeps need synthetic data; use realdata for csv");
  SweepTable table;
  for (Method m : cfg.methods) table.methods.push_back(method_name(m));
  for (const auto& a : cfg.attacks) table.attacks.push_back(a.label);

  std::vector<Job> jobs;
  for (std::size_t a = 0; a < cfg.attacks.size(); ++a)
    for (std::size_t q : cfg.q_values)
      for (std::size_t r = 0; r < cfg.repeats; ++r) jobs.push_back({a, q, r});

  std::vector<std::vector<RunRow>> results(jobs.size());
  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
  int threads = cfg.workers > 0 ? static_cast<int>(cfg.workers) : parallel_threads();
  // Exceptions must not escape an OpenMP region; the first one is rethrown.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < n_jobs; ++j) {
    try {
      results[j] = run_job(cfg, jobs[j], cfg.methods);
    } catch (...) {
#pragma omp critical(robustreg_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& rs : results)
    for (auto& r : rs) {
      table.all_converged = table.all_converged && r.converged;
      table.rows.push_back(std::move(r));
    }
  std::sort(table.rows.begin(), table.rows.end(), [&](const RunRow& x, const RunRow& y) {
    const auto kx = std::make_tuple(index_of(table.attacks, x.attack), x.q,
                                    index_of(table.methods, x.method), x.repeat);
    const auto ky = std::make_tuple(index_of(table.attacks, y.attack), y.q,
                                    index_of(table.methods, y.method), y.repeat);
    return kx < ky;
  });
  return table;
}

std::vector<SummaryRow> summarize(const SweepTable& table) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<const RunRow*>> groups;
  for (const auto& r : table.rows)
    groups[{index_of(table.attacks, r.attack), r.q, index_of(table.methods, r.method)}].push_back(&r);

  std::vector<SummaryRow> out;
  for (const auto& [key, rows] : groups) {
    SummaryRow s;
    s.attack = rows.front()->attack;
    s.method = rows.front()->method;
    s.q = rows.front()->q;
    s.n = rows.front()->n;
    s.repeats = rows.size();
    const double k = static_cast<double>(rows.size());
    for (const RunRow* r : rows) {
      s.mean_rmse += r->rmse / k;
      s.mean_linf += r->linf / k;
    }
    if (rows.size() > 1) {
      for (const RunRow* r : rows) {
        s.sd_rmse += (r->rmse - s.mean_rmse) * (r->rmse - s.mean_rmse);
        s.sd_linf += (r->linf - s.mean_linf) * (r->linf - s.mean_linf);
      }
      s.sd_rmse = std::sqrt(s.sd_rmse / (k - 1.0));
      s.sd_linf = std::sqrt(s.sd_linf / (k - 1.0));
    }
    out.push_back(s);
  }

  // Worst case over the configured attacks, per (method, q).
  if (table.attacks.size() > 1) {
    std::map<std::pair<std::size_t, std::size_t>, SummaryRow> worst;
    for (const auto& s : out) {
      const auto key = std::make_pair(s.q, index_of(table.methods, s.method));
      auto it = worst.find(key);
      if (it == worst.end()) {
        SummaryRow w = s;
        w.attack = "worst";
        w.sd_rmse = w.sd_linf = 0.0;
        worst.emplace(key, w);
      } else {
        it->second.mean_rmse = std::max(it->second.mean_rmse, s.mean_rmse);
        it->second.mean_linf = std::max(it->second.mean_linf, s.mean_linf);
      }
    }
    for (auto& [key, w] : worst) out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

// Writes files under temporary names and renames them into place on commit.
// Anything not committed is removed, so a failed run leaves no partial output.
class OutputBatch {
 public:
  explicit OutputBatch(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  OutputBatch(const OutputBatch&) = delete;
  OutputBatch& operator=(const OutputBatch&) = delete;
  ~OutputBatch() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, final] : files_) std::filesystem::remove(tmp, ec);
  }

  void write(const std::string& name, const std::string& content) {
    const auto final = dir_ / name;
    auto tmp = final;
    tmp += ".partial";
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    files_.emplace_back(tmp, final);
    out << content;
    out.close();
    if (!out) throw DataError("write failed: " + tmp.string());
  }

  std::vector<std::filesystem::path> commit() {
    std::vector<std::filesystem::path> out;
    for (const auto& [tmp, final] : files_) {
      std::filesystem::rename(tmp, final);
      out.push_back(final);
    }
    committed_ = true;
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
  bool committed_ = false;
};

}  // namespace

std::string runs_csv_header() { return "method,attack,q,repeat,N,h,T,M,seed,rmse,linf"; }

std::string format_run_row(const RunRow& r) {
  std::ostringstream os;
  os << r.method << ',' << r.attack << ',' << r.q << ',' << r.repeat << ',' << r.n << ','
     << format_double(r.h) << ',' << format_double(r.T) << ',' << format_double(r.M) << ','
     << r.seed << ',' << format_double(r.rmse) << ',' << format_double(r.linf);
  return os.str();
}

void write_sweep(const std::filesystem::path& dir, const SweepTable& table) {
  std::ostringstream runs;
  runs << runs_csv_header() << '\n';
  for (const auto& r : table.rows) runs << format_run_row(r) << '\n';

  std::ostringstream summary;
  summary << "method,attack,q,N,repeats,mean_rmse,mean_linf,sd_rmse,sd_linf\n";
  for (const auto& s : summarize(table))
    summary << s.method << ',' << s.attack << ',' << s.q << ',' << s.n << ',' << s.repeats << ','
            << format_double(s.mean_rmse) << ',' << format_double(s.mean_linf) << ','
            << format_double(s.sd_rmse) << ',' << format_double(s.sd_linf) << '\n';

  OutputBatch batch(dir);
  batch.write("runs.csv", runs.str());
  batch.write("summary.csv", summary.str());
  batch.commit();
}

std::vector<std::filesystem::path> emit_plotdata(const std::vector<SummaryRow>& summary,
                                                 const std::filesystem::path& dir) {
  if (summary.empty()) throw DataError("no sweep results to emit");
  std::vector<std::string> attacks, methods;
  std::vector<std::size_t> qs;
  auto add = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& s : summary) {
    add(attacks, s.attack);
    add(methods, s.method);
    add(qs, s.q);
  }
  std::sort(qs.begin(), qs.end());
  if (methods.empty()) throw DataError("no methods in sweep results");

  std::map<std::tuple<std::string, std::string, std::size_t>, const SummaryRow*> at;
  for (const auto& s : summary) at[{s.attack, s.method, s.q}] = &s;

  OutputBatch batch(dir);
  for (const char* metric : {"rmse", "linf"}) {
    const bool is_rmse = std::string(metric) == "rmse";
    for (const auto& a : attacks) {
      std::ostringstream os;
      os << 'q';
      for (const auto& m : methods) os << ',' << m;
      os << '\n';
      for (std::size_t q : qs) {
        os << q;
        for (const auto& m : methods) {
          const auto it = at.find({a, m, q});
          os << ',';
          if (it != at.end()) os << format_double(is_rmse ? it->second->mean_rmse : it->second->mean_linf);
        }
        os << '\n';
      }
      batch.write(std::string(metric) + "_" + a + ".csv", os.str());
    }
  }
  return batch.commit();
}

// ---------------------------------------------------------------------------
// Real data

double RealDataReport::median_rmse(const std::string& attack, const std::string& method) const {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.attack == attack && r.method == method) v.push_back(r.rmse);
  if (v.empty()) throw std::out_of_range("no rows for " + attack + "/" + method);
  return median(v);
}

double RealDataReport::mean_rmse(const std::string& attack, const std::string& method) const {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.attack == attack && r.method == method) v.push_back(r.rmse);
  if (v.empty()) throw std::out_of_range("no rows for " + attack + "/" + method);
  return mean(v);
}

namespace {

double rmse_against(std::span<const double> pred, std::span<const double> truth) {
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

// Corrected predictions at the test points. Up to 3 dimensions the grid
// projection is used; beyond that the projection runs on the k-NN graph of
// the training and test covariates together.
std::pair<std::vector<double>, bool> corrected_predictions(const ExperimentConfig& cfg,
                                                           const HuberEstimator& initial,
                                                           const Dataset& train,
                                                           const Dataset& test) {
  const ProjectionParams params{cfg.L, cfg.proj_tol, cfg.max_sweeps};
  if (train.dim() <= 3) {
    const CorrectedEstimator c(initial, Grid::unit_cube(train.dim(), cfg.grid), params);
    return {predict_parallel(c, test.points()), c.converged()};
  }
  std::vector<double> coords(train.points().coords().begin(), train.points().coords().end());
  coords.insert(coords.end(), test.points().coords().begin(), test.points().coords().end());
  const PointSet nodes(train.dim(), std::move(coords));
  const auto proj = project_scattered(initial, nodes, cfg.knn, params);
  return {std::vector<double>(proj.values.begin() + static_cast<std::ptrdiff_t>(train.size()),
                              proj.values.end()),
          proj.converged};
}

}  // namespace

RealDataReport run_realdata(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.synthetic) throw ConfigError("data.source", "realdata needs 'csv' data");
  const ScaledTable table = load_csv(cfg.csv_path, cfg.target_column);
  const Kernel kernel = Kernel::parse(cfg.kernel);
  const double h = cfg.huber.h, M = cfg.huber.M;

  RealDataReport report;
  for (Method m : cfg.methods) report.methods.push_back(method_name(m));
  for (const auto& a : cfg.attacks) report.attacks.push_back(a.label);

  for (std::size_t s = 0; s < cfg.splits; ++s) {
    auto [train, test] =
        split_train_test(table.data, cfg.train_fraction, derive_seed(cfg.seed, {"split", std::to_string(s)}));
    const std::size_t q = static_cast<std::size_t>(
        std::floor(cfg.q_fraction * static_cast<double>(train.size()) + 1e-9));
    const auto truth = test.labels();

    auto row = [&](const std::string& attack, const std::string& method, double rmse, bool ok) {
      report.rows.push_back({attack, method, s, attack == "none" ? 0 : q, train.size(), test.size(),
                             rmse, ok});
      report.all_converged = report.all_converged && ok;
    };

    {
      const NadarayaWatsonEstimator clean(train, h, kernel, M);
      row("none", "nw", rmse_against(predict_parallel(clean, test.points()), truth), true);
    }

    for (const auto& attack : cfg.attacks) {
      const auto attacked = apply_attack(train, attack.spec, q,
                                         derive_seed(cfg.seed, {"attack", attack.label, std::to_string(s)}));
      const Dataset& d = attacked.dataset;
      std::unique_ptr<HuberEstimator> huber;
      for (Method m : cfg.methods) {
        const std::uint64_t seed = derive_seed(cfg.seed, {method_name(m), attack.label, std::to_string(s)});
        std::vector<double> pred;
        bool ok = true;
        if ((m == Method::huber || m == Method::corrected) && !huber)
          huber = std::make_unique<HuberEstimator>(d, cfg.huber, kernel);
        switch (m) {
          case Method::nw:
            pred = predict_parallel(NadarayaWatsonEstimator(d, h, kernel, M), test.points());
            break;
          case Method::mom:
            pred = predict_parallel(MedianOfMeansEstimator(d, h, kernel, M, cfg.groups, seed), test.points());
            break;
          case Method::trimmed:
            pred = predict_parallel(TrimmedMeanEstimator(d, h, kernel, M, cfg.trim), test.points());
            break;
          case Method::huber:
            pred = predict_parallel(*huber, test.points());
            break;
          case Method::corrected:
            std::tie(pred, ok) = corrected_predictions(cfg, *huber, d, test);
            break;
        }
        row(attack.label, method_name(m), rmse_against(pred, truth), ok);
      }
    }
  }
  return report;
}

void write_realdata(const std::filesystem::path& dir, const RealDataReport& report) {
  std::ostringstream runs;
  runs << "attack,method,split,q,n_train,n_test,rmse\n";
  for (const auto& r : report.rows)
    runs << r.attack << ',' << r.method << ',' << r.split << ',' << r.q << ',' << r.n_train << ','
         << r.n_test << ',' << format_double(r.rmse) << '\n';

  std::ostringstream tab;
  tab << "attack,clean";
  for (const auto& m : report.methods) tab << ',' << m;
  tab << '\n';
  const double clean = report.mean_rmse("none", "nw");
  for (const auto& a : report.attacks) {
    tab << a << ',' << format_double(clean);
    for (const auto& m : report.methods) tab << ',' << format_double(report.mean_rmse(a, m));
    tab << '\n';
  }

  OutputBatch batch(dir);
  batch.write("realdata_runs.csv", runs.str());
  batch.write("table.csv", tab.str());
  batch.commit();
}

}  // namespace robustreg
