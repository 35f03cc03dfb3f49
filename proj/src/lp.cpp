#include "robustreg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robustreg {
namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double& cost(std::size_t j) { return at(rows_, j); }  // objective row
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t j = 0; j <= cols_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(pr, j);
      at(i, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Minimizes the objective row over columns [0, allowed). False if unbounded.
  bool optimize(std::size_t allowed) {
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (cost(j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = rows_;
      double best = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (leave == rows_ || ratio < best - 1e-13 ||
            (ratio <= best + 1e-13 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A, std::span<const double> b,
                  std::span<const double> c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("constraint and bound counts differ");

  std::vector<std::size_t> art_rows;
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0.0) art_rows.push_back(i);
  const std::size_t n_art = art_rows.size();
  const std::size_t real_cols = n + m;  // originals + slack/surplus
  Tableau t(m, real_cols + n_art);

  std::size_t next_art = real_cols;
  for (std::size_t i = 0; i < m; ++i) {
    if (A[i].size() != n) throw std::invalid_argument("constraint row has wrong width");
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * A[i][j];
    t.at(i, n + i) = sign;
    t.rhs(i) = sign * b[i];
    if (sign < 0.0) {
      t.at(i, next_art) = 1.0;
      t.basis(i) = next_art++;
    } else {
      t.basis(i) = n + i;
    }
  }

  LpResult result;
  if (n_art > 0) {
    for (std::size_t j = real_cols; j < real_cols + n_art; ++j) t.cost(j) = 1.0;
    for (std::size_t i : art_rows)
      for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) -= t.at(i, j);
    t.optimize(real_cols + n_art);
    double scale = 1.0;
    for (double v : b) scale += std::abs(v);
    if (-t.cost(t.cols()) > 1e-9 * scale) return result;  // infeasible
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis(i) < real_cols) continue;
      for (std::size_t j = 0; j < real_cols; ++j) {
        if (std::abs(t.at(i, j)) > 1e-9) {
          t.pivot(i, j);
          break;
        }
      }
    }
    // Artificial columns are never allowed to re-enter below.
  }

  for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bv = t.basis(i);
    const double cb = bv < n ? c[bv] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) -= cb * t.at(i, j);
  }
  if (!t.optimize(real_cols)) {
    result.status = LpResult::Status::unbounded;
    return result;
  }

  result.status = LpResult::Status::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis(i) < n) result.x[t.basis(i)] = t.rhs(i);
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

ExactProjection project_on_graph_exact(std::span<const double> r, const ConstraintGraph& graph,
                                       std::size_t max_constraints) {
  const std::size_t n = r.size();
  if (n != graph.size()) throw std::invalid_argument("value count does not match graph size");
  const std::size_t rows = 2 * n + 2 * graph.edges().size() + 1;
  if (rows > max_constraints) throw std::length_error("problem too large for the exact LP backend");

  // Variables: p_j = g_j - min(r) >= 0 (optimal g never leaves [min r, max r]),
  // then e_j >= |g_j - r_j|.
  const double rmin = *std::min_element(r.begin(), r.end());
  const std::size_t nv = 2 * n;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  A.reserve(rows);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = r[j] - rmin;
    std::vector<double> up(nv, 0.0), down(nv, 0.0);
    up[j] = 1.0;
    up[n + j] = -1.0;
    A.push_back(std::move(up));
    b.push_back(s);
    down[j] = -1.0;
    down[n + j] = -1.0;
    A.push_back(std::move(down));
    b.push_back(-s);
  }
  for (const auto& e : graph.edges()) {
    std::vector<double> fwd(nv, 0.0), bwd(nv, 0.0);
    fwd[e.u] = 1.0;
    fwd[e.v] = -1.0;
    A.push_back(std::move(fwd));
    b.push_back(e.bound);
    bwd[e.u] = -1.0;
    bwd[e.v] = 1.0;
    A.push_back(std::move(bwd));
    b.push_back(e.bound);
  }

  std::vector<double> c(nv, 0.0);
  for (std::size_t j = 0; j < n; ++j) c[n + j] = 1.0;
  const LpResult best = solve_lp(A, b, c);
  if (best.status != LpResult::Status::optimal) throw std::runtime_error("projection LP failed");

  ExactProjection out;
  out.objective = best.objective;

  // Restrict to the optimal face, then push sum(g) down and up.
  std::vector<double> face(nv, 0.0);
  for (std::size_t j = 0; j < n; ++j) face[n + j] = 1.0;
  A.push_back(face);
  b.push_back(best.objective + 1e-11 * (1.0 + best.objective));

  auto extreme = [&](double sign) {
    std::vector<double> obj(nv, 0.0);
    for (std::size_t j = 0; j < n; ++j) obj[j] = sign;
    const LpResult res = solve_lp(A, b, obj);
    if (res.status != LpResult::Status::optimal) throw std::runtime_error("projection LP failed");
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = res.x[j] + rmin;
    return g;
  };
  out.least = extreme(1.0);
  out.greatest = extreme(-1.0);
  out.canonical.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.canonical[j] = 0.5 * (out.least[j] + out.greatest[j]);
  return out;
}

}  // namespace robustreg
