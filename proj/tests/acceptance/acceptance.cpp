// Acceptance checks. Each criterion prints exactly one line:
//   criterion <n> PASS|FAIL <details>
// Usage: acceptance [--criterion N]... (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "robustreg/attacks.hpp"
#include "robustreg/data_io.hpp"
#include "robustreg/errors.hpp"
#include "robustreg/estimators.hpp"
#include "robustreg/experiments.hpp"
#include "robustreg/lipschitz.hpp"
#include "robustreg/metrics.hpp"
#include "robustreg/projection.hpp"
#include "robustreg/rng.hpp"
#include "robustreg/stats.hpp"

using namespace robustreg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

ExperimentConfig preset(const std::string& name) {
  return ExperimentConfig::from(Config::load(fs::path(ROBUSTREG_SOURCE_DIR) / "configs" / (name + ".cfg")));
}

// --- 1: Huber solver against a dense grid scan --------------------------------

Outcome huber_vs_grid_scan() {
  Rng rng(101);
  const double Ts[] = {0.5, 1.0, 2.0};
  const double M = 3.0, h = 1.0;
  const Kernel kernel = Kernel::triangular_shifted();
  double worst = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.index(200);
    std::vector<double> xs(n), ys(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = rng.uniform(0.0, 1.0);
      ys[i] = rng.uniform(-10.0, 10.0);
      w[i] = 2.0 - std::abs(xs[i] - 0.5) / h;  // the shifted triangular kernel, written out
    }
    if (t % 10 == 0)
      for (auto& y : ys) y = std::round(y);  // tied labels
    const double T = Ts[t % 3];
    const Dataset data(PointSet(1, xs), ys);
    const double x[] = {0.5};
    const auto est = fit_huber(data, {h, T, M}, kernel, x, HuberParams{h, T, M}.default_tol());
    const double got = oracle::huber_objective(w, ys, T, est.value);
    const auto scan = oracle::huber_grid_scan(w, ys, T, M, 1e-4);
    worst = std::max(worst, got - scan.min);
  }
  return {worst <= 2e-4, "max excess over grid scan " + fmt(worst)};
}

// --- 2 and 3: projection ------------------------------------------------------

Grid random_grid(Rng& rng, bool two_d) {
  if (two_d) return Grid::unit_cube(2, 2 + rng.index(3));
  return Grid::unit_cube(1, 2 + rng.index(11));
}

std::vector<double> random_values(Rng& rng, std::size_t n) {
  std::vector<double> r(n);
  const int style = static_cast<int>(rng.index(3));
  for (double& v : r) {
    v = rng.uniform(-3.0, 3.0);
    if (style == 1) v = std::round(v);
    if (style == 2 && rng.bernoulli(0.2)) v += rng.bernoulli(0.5) ? 10.0 : -10.0;
  }
  return r;
}

Outcome projection_vs_lp() {
  Rng rng(202);
  double worst_gap = 0.0, worst_viol = 0.0;
  int instances = 0;
  for (int t = 0; t < 700; ++t) {
    const bool two_d = t >= 500;
    const Grid grid = random_grid(rng, two_d);
    const double L = rng.uniform(0.2, 8.0);
    const GridFunction r(grid, random_values(rng, grid.size()));
    const auto it = project_lipschitz(r, {L, 1e-9, 10000});
    const auto ex = project_lipschitz_exact(r, L);
    worst_gap = std::max(worst_gap, std::abs(it.objective - ex.objective));
    worst_viol = std::max(worst_viol, max_violation(it.function.values, grid_graph(grid, L)));
    ++instances;
  }
  return {worst_gap <= 1e-6 && worst_viol == 0.0,
          std::to_string(instances) + " instances, max objective gap " + fmt(worst_gap) +
              ", max constraint violation " + fmt(worst_viol)};
}

Outcome projection_properties() {
  Rng rng(303);
  const double tol = 1e-9;
  const int per_property = 250;
  int idem = 0, shift = 0, mono = 0, nonexp = 0;
  for (int t = 0; t < per_property; ++t) {
    const Grid grid = random_grid(rng, t % 3 == 0);
    const double L = rng.uniform(0.2, 6.0);
    const ProjectionParams params{L, tol, 10000};
    const auto graph = grid_graph(grid, L);
    const std::size_t n = grid.size();
    const GridFunction r(grid, random_values(rng, n));
    const auto ex = project_lipschitz_exact(r, L);
    const auto it = project_lipschitz(r, params);

    // Idempotence: the projection is feasible, so projecting again costs nothing
    // and returns it unchanged.
    {
      const GridFunction p(grid, ex.canonical);
      const auto again = project_lipschitz_exact(p, L);
      const auto again_it = project_lipschitz(it.function, params);
      bool ok = again.objective <= 1e-9;
      for (std::size_t j = 0; j < n; ++j)
        ok = ok && std::abs(again.canonical[j] - ex.canonical[j]) <= 2 * tol &&
             std::abs(again_it.function.values[j] - it.function.values[j]) <= 2 * tol;
      idem += !ok;
    }
    // Shift equivariance.
    {
      const double c = rng.uniform(-5.0, 5.0);
      std::vector<double> shifted = r.values;
      for (double& v : shifted) v += c;
      const GridFunction rs(grid, shifted);
      const auto exs = project_lipschitz_exact(rs, L);
      const auto its = project_lipschitz(rs, params);
      bool ok = std::abs(exs.objective - ex.objective) <= 1e-9;
      for (std::size_t j = 0; j < n; ++j)
        ok = ok && std::abs(exs.canonical[j] - (ex.canonical[j] + c)) <= 2 * tol &&
             std::abs(its.function.values[j] - (it.function.values[j] + c)) <= 2 * tol;
      shift += !ok;
    }
    // Monotonicity: r <= r2 pointwise implies F[r] <= F[r2].
    {
      std::vector<double> up = r.values;
      for (double& v : up)
        if (rng.bernoulli(0.5)) v += rng.uniform(0.0, 4.0);
      const GridFunction r2(grid, up);
      const auto ex2 = project_lipschitz_exact(r2, L);
      const auto it2 = project_lipschitz(r2, params);
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        ok = ok && ex.least[j] <= ex2.least[j] + 1e-9 && ex.greatest[j] <= ex2.greatest[j] + 1e-9 &&
             ex.canonical[j] <= ex2.canonical[j] + 1e-9 &&
             it.function.values[j] <= it2.function.values[j] + 2 * tol;
      }
      mono += !ok;
    }
    // Sup-norm non-expansion against a Lipschitz target on the grid.
    {
      // Random walk along the raster order keeps every grid edge within L*a
      // only in 1-D; in 2-D use a sum of per-axis walks.
      std::vector<double> target(n, 0.0);
      const double step = L * grid.spacing();
      std::vector<std::vector<double>> axis(grid.dim());
      for (std::size_t k = 0; k < grid.dim(); ++k) {
        const std::size_t m = grid.counts()[k];
        axis[k].assign(m, rng.uniform(-1.0, 1.0));
        for (std::size_t i = 1; i < m; ++i)
          axis[k][i] = axis[k][i - 1] + rng.uniform(-1.0, 1.0) * step / static_cast<double>(grid.dim());
      }
      for (std::size_t j = 0; j < n; ++j) {
        const auto mi = grid.multi_index(j);
        for (std::size_t k = 0; k < grid.dim(); ++k) target[j] += axis[k][mi[k]];
      }
      double before = 0.0, after_ex = 0.0, after_it = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        before = std::max(before, std::abs(r.values[j] - target[j]));
        after_ex = std::max({after_ex, std::abs(ex.least[j] - target[j]), std::abs(ex.greatest[j] - target[j]),
                             std::abs(ex.canonical[j] - target[j])});
        after_it = std::max(after_it, std::abs(it.function.values[j] - target[j]));
      }
      const bool target_ok = max_violation(target, graph) <= 1e-12;
      nonexp += !(target_ok && after_ex <= before + 2 * tol && after_it <= before + 2 * tol);
    }
  }
  const bool pass = idem == 0 && shift == 0 && mono == 0 && nonexp == 0;
  return {pass, std::to_string(per_property) + " instances per property; violations: idempotence " +
                    std::to_string(idem) + ", shift " + std::to_string(shift) + ", monotonicity " +
                    std::to_string(mono) + ", sup-norm non-expansion " + std::to_string(nonexp)};
}

// --- 4: concentrated attack around two fixed centers --------------------------

Outcome fig1_profile() {
  auto cfg = preset("fig1");
  cfg.methods = {Method::huber, Method::corrected};
  const auto table = run_sweep(cfg);
  const auto summary = summarize(table);
  double init500 = -1, init2000 = -1, corr2000 = -1;
  for (const auto& s : summary) {
    if (s.attack == "worst") continue;
    if (s.method == "huber" && s.q == 500) init500 = s.mean_linf;
    if (s.method == "huber" && s.q == 2000) init2000 = s.mean_linf;
    if (s.method == "corrected" && s.q == 2000) corr2000 = s.mean_linf;
  }
  const bool pass = init500 >= 0 && init500 <= 0.6 && init2000 >= 1.0 && corr2000 >= 0 && corr2000 <= 0.5 &&
                    table.all_converged;
  return {pass, "mean sup error over " + std::to_string(cfg.repeats) + " seeds: initial q=500 " + fmt(init500) +
                    " (<= 0.6), initial q=2000 " + fmt(init2000) + " (>= 1.0), corrected q=2000 " +
                    fmt(corr2000) + " (<= 0.5)"};
}

// --- 5: orderings of the budget sweep ----------------------------------------

Outcome fig2_ordering() {
  auto cfg = preset("fig2");
  cfg.methods = {Method::nw, Method::huber, Method::corrected};
  cfg.q_values = {0, 2500, 5000};
  cfg.repeats = 50;
  const auto summary = summarize(run_sweep(cfg));
  auto mean = [&](const std::string& attack, const std::string& method, std::size_t q) {
    for (const auto& s : summary)
      if (s.attack == attack && s.method == method && s.q == q) return s.mean_rmse;
    return std::nan("");
  };
  bool pass = true;
  std::ostringstream os;
  for (std::size_t q : {2500u, 5000u}) {
    const double c = mean("concentrated", "corrected", q), i = mean("concentrated", "huber", q),
                 n = mean("concentrated", "nw", q);
    pass = pass && c < i && i < n;
    os << "concentrated q=" << q << ": corrected " << fmt(c) << " < initial " << fmt(i) << " < nw " << fmt(n)
       << "; ";
  }
  for (const char* a : {"random", "one_directional"}) {
    const double i = mean(a, "huber", 5000), n = mean(a, "nw", 5000);
    pass = pass && i <= 0.5 * n;
    os << a << " q=5000: initial " << fmt(i) << " <= 0.5 x nw " << fmt(n) << "; ";
  }
  std::string d = os.str();
  d.resize(d.size() - 2);
  return {pass, d};
}

// --- 6: clean-data rate -------------------------------------------------------

Outcome clean_rate() {
  const std::size_t reps = 50;
  const auto truth = TargetFunction::sine1d();
  const Kernel kernel = Kernel::triangular_shifted();
  std::vector<std::pair<double, double>> pts;
  std::ostringstream os;
  for (std::size_t n : {1000u, 2000u, 4000u, 8000u, 16000u}) {
    const double h = std::pow(static_cast<double>(n), -1.0 / 3.0);
    double mse = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto data = generate_synthetic(n, 1, truth, {1.0}, derive_seed(7, {"rate", std::to_string(n), std::to_string(r)}));
      const HuberEstimator est(data, {h, 1.0, 3.0}, kernel);
      const double rmse = eval_l2(est, truth, 1000, derive_seed(7, {"rate-eval", std::to_string(r)}));
      mse += rmse * rmse / static_cast<double>(reps);
    }
    pts.push_back({static_cast<double>(n), mse});
    os << "N=" << n << " mse " << fmt(mse) << "; ";
  }
  const double slope = fit_rate(pts);
  return {slope >= -1.0 && slope <= -0.35, "slope " + fmt(slope) + " in [-1, -0.35]; " + os.str().substr(0, os.str().size() - 2)};
}

// --- 7: TV mixture ------------------------------------------------------------

double mean_alpha(double slope_times_radius) {
  return oracle::integrate(
      [&](double u) {
        const double tv = gaussian_tv(0.0, slope_times_radius * (1.0 - u), 1.0);
        return tv / (1.0 + tv);
      },
      0.0, 1.0, 4000);
}

Outcome tv_indistinguishable() {
  const std::size_t n = 50000;
  const double slope = 2.0, sigma = 1.0;
  // Radius with average mixing weight 0.2 over the attacked region.
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_alpha(mid) < 0.2 ? lo : hi) = mid;
  }
  const double radius = 0.5 * (lo + hi) / slope;
  const auto eta1 = TargetFunction::constant(0.0);
  const auto eta2 = TargetFunction::cone(slope, radius);

  int accepted = 0;
  double alpha_hat = 0.0;
  for (int s = 0; s < 20; ++s) {
    auto region_labels = [&](const TargetFunction& truth, int which, std::uint64_t seed, std::size_t* attacked,
                             std::size_t* in_region) {
      const auto data = generate_synthetic(n, 1, truth, {sigma}, seed);
      const auto att = attack_tv_mixture(data, n, eta1, eta2, sigma, radius, which, seed + 1);
      std::vector<double> ys;
      for (std::size_t i = 0; i < n; ++i)
        if (data.point(i)[0] <= radius) ys.push_back(att.dataset.label(i));
      *attacked = att.attacked.size();
      *in_region = ys.size();
      return ys;
    };
    std::size_t a1 = 0, n1 = 0, a2 = 0, n2 = 0;
    const auto y1 = region_labels(eta1, 1, derive_seed(11, {"tv", "1", std::to_string(s)}), &a1, &n1);
    const auto y2 = region_labels(eta2, 2, derive_seed(11, {"tv", "2", std::to_string(s)}), &a2, &n2);
    accepted += ks_two_sample(y1, y2).p_value >= 0.01;
    alpha_hat += 0.5 * (static_cast<double>(a1) / n1 + static_cast<double>(a2) / n2) / 20.0;
  }
  return {accepted >= 18, std::to_string(accepted) + "/20 runs not rejected at 1%; radius " + fmt(radius) +
                              ", attacked fraction in region " + fmt(alpha_hat, 3)};
}

// --- 8: real data -------------------------------------------------------------

Outcome realdata_wine() {
  const char* env = std::getenv("ROBUSTREG_DATA_DIR");
  const fs::path dir = env && *env ? fs::path(env) : fs::path(ROBUSTREG_SOURCE_DIR) / "data";
  const fs::path csv = dir / "winequality-red.csv";
  if (!fs::exists(csv)) return {false, "dataset not available: " + csv.string()};
  auto raw = Config::load(fs::path(ROBUSTREG_SOURCE_DIR) / "configs" / "realdata_wine.cfg");
  raw.set("data.path", csv.string());
  raw.set("experiment.attacks", "concentrated=concentrated:10");
  raw.set("experiment.methods", "nw, corrected");
  const auto report = run_realdata(ExperimentConfig::from(raw));
  const double c = report.median_rmse("concentrated", "corrected");
  const double k = report.median_rmse("concentrated", "nw");
  return {c < 0.5 * k, "median test RMSE over 10 splits: corrected " + fmt(c) + " < 0.5 x nw " + fmt(k)};
}

// --- 9: determinism -----------------------------------------------------------

Outcome cell_determinism() {
  auto cfg = preset("fig2");
  cfg.q_values = {0, 2500, 5000};
  cfg.repeats = 2;
  const auto table = run_sweep(cfg);
  std::size_t mismatches = 0;
  for (const auto& row : table.rows) {
    const NamedAttack* attack = nullptr;
    for (const auto& a : cfg.attacks)
      if (a.label == row.attack) attack = &a;
    const auto cell = run_cell(cfg, parse_method(row.method), *attack, row.q, row.repeat);
    mismatches += format_run_row(cell) != format_run_row(row);
  }
  return {mismatches == 0, std::to_string(table.rows.size()) + " cells re-run in isolation, " +
                               std::to_string(mismatches) + " differ from the sweep"};
}

struct Criterion {
  int id;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, 10, huber_vs_grid_scan},   {2, 30, projection_vs_lp}, {3, 600, projection_properties},
      {4, 120, fig1_profile},        {5, 600, fig2_ordering},   {6, 600, clean_rate},
      {7, 120, tv_indistinguishable}, {8, 120, realdata_wine},  {9, 600, cell_determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      wanted.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    std::cout << "criterion " << c.id << (pass ? " PASS " : " FAIL ") << o.details << " [" << fmt(secs, 3)
              << " s, limit " << c.limit_seconds << " s" << (in_time ? "" : ", too slow") << "]" << std::endl;
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
