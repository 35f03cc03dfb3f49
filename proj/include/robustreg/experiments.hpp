#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "robustreg/attacks.hpp"
#include "robustreg/config.hpp"
#include "robustreg/estimators.hpp"

namespace robustreg {

enum class Method { nw, mom, trimmed, huber, corrected };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct NamedAttack {
  std::string label;  // names the attack in tables, file names and seeds
  AttackSpec spec;
};

struct ExperimentConfig {
  std::string name = "experiment";

  // data
  bool synthetic = true;
  std::size_t n = 10000;
  std::size_t dim = 1;
  std::string target = "sine1d";
  double sigma = 1.0;
  std::filesystem::path csv_path;
  std::string target_column;
  double train_fraction = 0.9;
  std::size_t splits = 10;

  // what to run
  std::vector<Method> methods;
  std::vector<NamedAttack> attacks;
  std::vector<std::size_t> q_values;  // synthetic sweeps
  double q_fraction = 0.1;            // real data: q = floor(q_fraction * N_train)

  // estimators
  HuberParams huber{0.03, 1.0, 3.0};
  std::string kernel = "triangular_shifted";
  std::size_t groups = 20;
  double trim = 0.2;

  // correction
  double L = 6.283185307179586;
  std::size_t grid = 50;
  double proj_tol = 1e-9;
  std::size_t max_sweeps = 10000;
  std::size_t knn = 10;

  // evaluation
  std::size_t n_eval = 1000;
  std::size_t linf_resolution = 0;  // 0: per-dimension default

  // run
  std::size_t repeats = 50;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: OpenMP default
  std::filesystem::path output;

  /// Reads and validates; unknown keys and bad values raise ConfigError.
  static ExperimentConfig from(const Config& cfg);
  void validate() const;
};

/// "0:5000:500" (inclusive range) or "0, 2500, 5000".
std::vector<std::size_t> parse_q_schedule(const std::string& text);

/// Stable seed derivation: FNV-1a over the parts joined by '|', mixed with
/// the base seed through splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string> parts);

/// max((q/N)^(1/(d+1)), N^(-1/(d+2))). A helper only; never applied implicitly.
double h_default(std::size_t n, std::size_t dim, std::size_t q);

struct RunRow {
  std::string method;
  std::string attack;
  std::size_t q = 0;
  std::size_t repeat = 0;
  std::size_t n = 0;
  double h = 0.0, T = 0.0, M = 0.0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double linf = 0.0;
  bool converged = true;
};

struct SummaryRow {
  std::string method;
  std::string attack;  // "worst" rows take the max over configured attacks
  std::size_t q = 0;
  std::size_t n = 0;
  std::size_t repeats = 0;
  double mean_rmse = 0.0;
  double mean_linf = 0.0;
  double sd_rmse = 0.0;
  double sd_linf = 0.0;
};

struct SweepTable {
  std::vector<std::string> methods;  // config order
  std::vector<std::string> attacks;  // config order
  std::vector<RunRow> rows;          // sorted by (attack, q, method, repeat) in config order
  bool all_converged = true;
};

/// Fits and evaluates one (method, attack, q, repeat) cell from scratch.
RunRow run_cell(const ExperimentConfig& cfg, Method method, const NamedAttack& attack,
                std::size_t q, std::size_t repeat);

/// Every cell of the configured grid. Cells sharing (attack, q, repeat) share
/// their data and are run as one job; jobs run on `cfg.workers` threads.
SweepTable run_sweep(const ExperimentConfig& cfg);

std::vector<SummaryRow> summarize(const SweepTable& table);

std::string runs_csv_header();
std::string format_run_row(const RunRow& row);

/// Writes runs.csv and summary.csv into `dir`. Files appear only once all of
/// them have been written.
void write_sweep(const std::filesystem::path& dir, const SweepTable& table);

/// One CSV per (metric, attack): "<metric>_<attack>.csv" with columns q and
/// one per method holding the mean over repeats. Throws on an empty table.
std::vector<std::filesystem::path> emit_plotdata(const std::vector<SummaryRow>& summary,
                                                 const std::filesystem::path& dir);

struct RealDataRow {
  std::string attack;  // "none" for the clean-data baseline
  std::string method;
  std::size_t split = 0;
  std::size_t q = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double rmse = 0.0;
  bool converged = true;
};

struct RealDataReport {
  std::vector<std::string> methods;
  std::vector<std::string> attacks;
  std::vector<RealDataRow> rows;
  bool all_converged = true;

  /// Median test RMSE over splits.
  double median_rmse(const std::string& attack, const std::string& method) const;
  double mean_rmse(const std::string& attack, const std::string& method) const;
};

/// Scale, split, attack the training part, fit every method and score on the
/// clean test part. Repeated over `cfg.splits` split seeds.
RealDataReport run_realdata(const ExperimentConfig& cfg);

/// realdata_runs.csv plus table.csv: one row per attack with the clean-data
/// kernel regression RMSE followed by one column per method (means over splits).
void write_realdata(const std::filesystem::path& dir, const RealDataReport& report);

}  // namespace robustreg
