#include "trine/centrality.hpp"

#include <cmath>
#include <iostream>

namespace trine {
namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::span<double> v) {
  const double n = l2_norm(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double row_product(const TripartiteGraph& g, std::size_t i, std::span<const double> x) {
  const auto v = g.node_at(i);
  double acc = 0.0;
  for (auto q : kParties) {
    if (q == v.party) continue;
    const auto base = g.offset(q);
    for (const auto& n : g.neighbors(v, q)) acc += n.weight * x[base + n.index];
  }
  return acc;
}

void split(const TripartiteGraph& g, std::span<const double> flat, std::array<std::vector<double>, 3>& out) {
  for (auto p : kParties) {
    const auto off = g.offset(p);
    out[party_index(p)].assign(flat.begin() + off, flat.begin() + off + g.node_count(p));
  }
}

}  // namespace

void adjacency_multiply(const TripartiteGraph& g, std::span<const double> x, std::span<double> y, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(g.node_count());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = row_product(g, static_cast<std::size_t>(i), x);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = row_product(g, static_cast<std::size_t>(i), x);
  }
}

CentralityScores hits(const TripartiteGraph& g, const HitsOptions& opts, Exec exec) {
  if (opts.max_iter < 1) throw ConfigError("hits: max_iter must be >= 1");
  if (!(opts.tol > 0.0)) throw ConfigError("hits: tol must be > 0");

  const auto n = g.node_count();
  CentralityScores out;
  std::vector<double> hub(n, 0.0), auth(n, 0.0);
  if (g.edge_count() == 0) {
    out.degenerate = true;
    std::cerr << "warning: hits on a graph without edges; all scores are zero\n";
    split(g, auth, out.authority);
    split(g, hub, out.hub);
    return out;
  }

  std::fill(hub.begin(), hub.end(), 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next_auth(n), next_hub(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    adjacency_multiply(g, hub, next_auth, exec);  // a = A^T h
    normalize(next_auth);
    adjacency_multiply(g, next_auth, next_hub, exec);  // h = A a
    normalize(next_hub);

    const double change = std::max(l2_distance(next_auth, auth), l2_distance(next_hub, hub));
    auth.swap(next_auth);
    hub.swap(next_hub);
    out.iterations = it;
    if (change < opts.tol) {
      out.converged = true;
      break;
    }
  }
  split(g, auth, out.authority);
  split(g, hub, out.hub);
  return out;
}

int walk_budget(double score, int min_walks, int max_walks, double scale) {
  if (min_walks < 1) throw ConfigError("min walks must be >= 1");
  if (min_walks > max_walks) throw ConfigError("min walks exceeds max walks");
  if (!(scale > 0.0)) throw ConfigError("walk scale must be > 0");
  const double raw = std::ceil(score * scale);
  if (!(raw >= min_walks)) return min_walks;
  if (raw >= max_walks) return max_walks;
  return static_cast<int>(raw);
}

}  // namespace trine
