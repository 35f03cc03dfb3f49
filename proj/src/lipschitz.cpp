#include "robustreg/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

namespace robustreg {

ConstraintGraph::ConstraintGraph(std::size_t n_nodes, std::vector<Edge> edges)
    : n_(n_nodes), edges_(std::move(edges)), offsets_(n_nodes + 1, 0) {
  for (const auto& e : edges_) {
    if (e.u >= n_ || e.v >= n_ || e.u == e.v) throw std::invalid_argument("malformed constraint edge");
    if (!(e.bound >= 0.0) || !std::isfinite(e.bound))
      throw std::invalid_argument("edge bound must be finite and non-negative");
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t j = 0; j < n_; ++j) offsets_[j + 1] += offsets_[j];
  arcs_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    arcs_[fill[e.u]++] = {e.v, e.bound};
    arcs_[fill[e.v]++] = {e.u, e.bound};
  }
}

double l1_distance(std::span<const double> g, std::span<const double> r) {
  double total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) total += std::abs(g[j] - r[j]);
  return total;
}

double max_violation(std::span<const double> g, const ConstraintGraph& graph) {
  double worst = 0.0;
  for (const auto& e : graph.edges()) worst = std::max(worst, std::abs(g[e.u] - g[e.v]) - e.bound);
  return worst;
}

namespace {

// Dinic max-flow on small integer-capacity networks.
class FlowNetwork {
 public:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  explicit FlowNetwork(std::size_t n) : head_(n, npos), level_(n), iter_(n) {}

  void add_edge(std::size_t from, std::size_t to, std::int64_t cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = arcs_.size() - 1;
    arcs_.push_back({from, head_[to], 0});
    head_[to] = arcs_.size() - 1;
  }

  std::int64_t max_flow(std::size_t s, std::size_t t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      for (std::size_t v = 0; v < head_.size(); ++v) iter_[v] = head_[v];
      while (std::int64_t f = dfs(s, t, kInf)) total += f;
    }
    return total;
  }

  /// Nodes reachable from s in the residual network (valid after max_flow).
  std::vector<char> residual_reachable(std::size_t s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t a = head_[v]; a != npos; a = arcs_[a].next) {
        if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = 1;
          stack.push_back(arcs_[a].to);
        }
      }
    }
    return seen;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  struct Arc {
    std::size_t to;
    std::size_t next;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (std::size_t a = head_[v]; a != npos; a = arcs_[a].next) {
        if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[v] + 1;
          q.push(arcs_[a].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t v, std::size_t t, std::int64_t limit) {
    if (v == t) return limit;
    for (std::size_t& a = iter_[v]; a != npos; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap > 0 && level_[arc.to] == level_[v] + 1) {
        const std::int64_t f = dfs(arc.to, t, std::min(limit, arc.cap));
        if (f > 0) {
          arc.cap -= f;
          arcs_[a ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<std::size_t> head_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

double median_of(std::span<const double> r) {
  std::vector<double> v(r.begin(), r.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Exact minimization of |g_j - r_j| over the box allowed by g_j's neighbors.
double node_update(std::size_t j, std::span<const double> g, std::span<const double> r,
                   const ConstraintGraph& graph) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& arc : graph.neighbors(j)) {
    lo = std::max(lo, g[arc.to] - arc.bound);
    hi = std::min(hi, g[arc.to] + arc.bound);
  }
  if (lo > hi) return g[j];  // rounding-level infeasibility; leave the node alone
  return std::clamp(r[j], lo, hi);
}

// Returns {sweeps, stalled}. Alternates raster and reverse order.
std::pair<std::size_t, bool> run_sweeps(std::vector<double>& g, std::span<const double> r,
                                        const ConstraintGraph& graph, const SolverOptions& opt) {
  const std::size_t n = g.size();
  const double threshold = opt.tol / static_cast<double>(std::max<std::size_t>(n, 1));
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t j = sweep % 2 == 0 ? step : n - 1 - step;
      const double updated = node_update(j, g, r, graph);
      biggest = std::max(biggest, std::abs(updated - g[j]));
      g[j] = updated;
    }
    if (biggest <= threshold) return {sweep + 1, true};
  }
  return {opt.max_sweeps, false};
}

// Block descent on f(g) + bias * eps * sum(g) for infinitesimal eps, where
// f(g) = sum |g_j - r_j|. bias = +1 drives toward the least optimal solution,
// -1 toward the greatest, 0 plain descent. Returns false if the move budget
// ran out.
class BlockDescent {
 public:
  BlockDescent(std::span<const double> r, const ConstraintGraph& graph, double eps)
      : r_(r), graph_(graph), eps_(eps) {}

  bool run(std::vector<double>& g, int bias, std::size_t budget, std::size_t& moves) {
    while (true) {
      bool moved = false;
      // Try the tie-break-favoured direction first.
      const int first = bias >= 0 ? -1 : +1;
      for (int dir : {first, -first}) {
        if (try_move(g, dir, bias)) {
          moved = true;
          break;
        }
      }
      if (!moved) return true;
      if (++moves >= budget) return false;
    }
  }

 private:
  // Directional derivative of |g_j - r_j| along dir, with the kink costing +1.
  int node_slope(std::span<const double> g, std::size_t j, int dir) const {
    const double diff = g[j] - r_[j];
    if (std::abs(diff) <= eps_) return 1;
    return (dir > 0) == (diff > 0) ? 1 : -1;
  }

  bool try_move(std::vector<double>& g, int dir, int bias) {
    const std::size_t n = g.size();
    const std::size_t src = n, snk = n + 1;
    FlowNetwork net(n + 2);

    const auto scale = static_cast<std::int64_t>(n + 1);
    std::int64_t profit_total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t w = scale * node_slope(g, j, dir) + static_cast<std::int64_t>(bias * dir);
      if (w < 0) {
        net.add_edge(src, j, -w);
        profit_total += -w;
      } else if (w > 0) {
        net.add_edge(j, snk, w);
      }
    }
    if (profit_total == 0) return false;

    // Moving a along dir while b stays: a must drag b if their constraint is tight.
    for (const auto& e : graph_.edges()) {
      const double diff = g[e.u] - g[e.v];
      if (dir * diff >= e.bound - eps_) net.add_edge(e.u, e.v, FlowNetwork::kInf);
      if (-dir * diff >= e.bound - eps_) net.add_edge(e.v, e.u, FlowNetwork::kInf);
    }

    const std::int64_t flow = net.max_flow(src, snk);
    if (profit_total - flow <= 0) return false;
    const auto in_set = net.residual_reachable(src);

    double step = std::numeric_limits<double>::infinity();
    std::size_t hit_node = n;
    for (const auto& e : graph_.edges()) {
      const bool su = in_set[e.u], sv = in_set[e.v];
      if (su == sv) continue;
      const std::size_t a = su ? e.u : e.v;
      const std::size_t b = su ? e.v : e.u;
      const double slack = e.bound - dir * (g[a] - g[b]);
      if (slack < step) {
        step = slack;
        hit_node = n;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_set[j] || node_slope(g, j, dir) > 0) continue;
      const double dist = std::abs(r_[j] - g[j]);
      if (dist < step) {
        step = dist;
        hit_node = j;
      }
    }
    if (!(step > 0.0) || !std::isfinite(step)) return false;

    for (std::size_t j = 0; j < n; ++j)
      if (in_set[j]) g[j] += dir * step;
    if (hit_node < n) g[hit_node] = r_[hit_node];
    return true;
  }

  std::span<const double> r_;
  const ConstraintGraph& graph_;
  double eps_;
};

void restore_feasibility(std::vector<double>& g, const ConstraintGraph& graph) {
  for (std::size_t j = 0; j < g.size(); ++j) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& arc : graph.neighbors(j)) {
      lo = std::max(lo, g[arc.to] - arc.bound);
      hi = std::min(hi, g[arc.to] + arc.bound);
    }
    if (lo <= hi) g[j] = std::clamp(g[j], lo, hi);
  }
  if (max_violation(g, graph) == 0.0) return;
  // Chains of tight constraints around a cycle cannot all hold exactly in
  // floating point. Contracting towards a constant (always feasible) by a
  // relative 1e-15..1e-6 opens enough slack; equal values stay equal.
  const double c = median_of(g);
  const std::vector<double> base = g;
  for (double shrink = 1e-15; shrink < 1e-5; shrink *= 4.0) {
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = c + (1.0 - shrink) * (base[j] - c);
    if (max_violation(g, graph) == 0.0) return;
  }
}

void check_input(std::span<const double> r, const ConstraintGraph& graph) {
  if (r.size() != graph.size()) throw std::invalid_argument("value count does not match graph size");
  if (r.empty()) throw std::invalid_argument("cannot project an empty function");
  for (double v : r)
    if (!std::isfinite(v)) throw std::invalid_argument("projection input must be finite");
}

}  // namespace

GraphProjection project_on_graph_sweeps(std::span<const double> r, const ConstraintGraph& graph,
                                        const SolverOptions& options) {
  check_input(r, graph);
  GraphProjection out;
  out.values.assign(r.size(), median_of(r));
  auto [sweeps, stalled] = run_sweeps(out.values, r, graph, options);
  restore_feasibility(out.values, graph);
  out.sweeps = sweeps;
  out.converged = stalled;
  out.objective = l1_distance(out.values, r);
  return out;
}

GraphProjection project_on_graph(std::span<const double> r, const ConstraintGraph& graph,
                                 const SolverOptions& options) {
  check_input(r, graph);
  const std::size_t n = r.size();

  double scale = 1.0;
  for (double v : r) scale = std::max(scale, std::abs(v));
  for (const auto& e : graph.edges()) scale = std::max(scale, e.bound);
  const double eps = 1e-11 * scale;
  const std::size_t budget = options.max_block_moves > 0 ? options.max_block_moves : 200 * n + 1000;

  GraphProjection out;
  std::vector<double> g(n, median_of(r));
  out.sweeps = run_sweeps(g, r, graph, options).first;

  BlockDescent descent(r, graph, eps);
  bool ok = descent.run(g, +1, budget, out.block_moves);
  std::vector<double> least = g;
  ok = ok && descent.run(g, -1, budget, out.block_moves);
  const std::vector<double>& greatest = g;

  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = 0.5 * (least[j] + greatest[j]);
  restore_feasibility(out.values, graph);
  out.converged = ok;
  out.objective = l1_distance(out.values, r);
  return out;
}

}  // namespace robustreg
