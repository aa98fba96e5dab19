#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "oromet/disjoint_set.hpp"
#include "oromet/error.hpp"
#include "oromet/metric_dataset.hpp"
#include "oromet/threshold_graph.hpp"

namespace oromet {

using AdjacencyList = std::vector<std::vector<std::size_t>>;

/// Per-point valuation results for one choice of delta.
struct OrometricScores {
  double delta_used = 0.0;
  std::vector<double> isolation;   // distance units
  std::vector<double> prominence;  // height units
  std::size_t positive_prominence_count = 0;
};

/// Isolation of every point: the distance to the nearest other point of at
/// least equal height, or the farthest distance in the dataset when no such
/// point exists.  Purely metric; the threshold graph plays no role here.
inline std::vector<double> isolation_all(const MetricDataset& ds) {
  const std::size_t n = ds.size();
  std::vector<double> iso(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double hm = ds.height(m);
    double nearest_peer = std::numeric_limits<double>::infinity();
    double farthest = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == m) continue;
      const double d = ds.distance(m, j);
      farthest = std::max(farthest, d);
      if (ds.height(j) >= hm) nearest_peer = std::min(nearest_peer, d);
    }
    iso[m] = std::isfinite(nearest_peer) ? nearest_peer : farthest;
  }
  return iso;
}

namespace detail {

inline void check_vertex(const AdjacencyList& adjacency, std::size_t v) {
  if (v >= adjacency.size())
    throw ValidationError("vertex " + std::to_string(v) + " out of range");
}

}  // namespace detail

/// Testing oracle: enumerates every simple path from m to a vertex of at
/// least equal height and takes the minimal descent over them.  Exponential;
/// refuses graphs larger than `oracle_bound` vertices.
inline double prominence_bruteforce(const AdjacencyList& adjacency,
                                    const std::vector<double>& heights, std::size_t m,
                                    std::size_t oracle_bound = 12) {
  detail::check_vertex(adjacency, m);
  if (adjacency.size() > oracle_bound)
    throw ValidationError("oracle-scale-exceeded: " + std::to_string(adjacency.size()) +
                          " vertices over the brute-force bound of " + std::to_string(oracle_bound));
  const double hm = heights[m];
  double mindesc = std::numeric_limits<double>::infinity();
  std::vector<char> visited(adjacency.size(), 0);
  visited[m] = 1;

  // Descent along a path only grows, so extending past a target or past the
  // best value so far cannot improve the minimum.
  auto dfs = [&](auto&& self, std::size_t u, double descent) -> void {
    if (u != m && heights[u] >= hm) {
      mindesc = std::min(mindesc, descent);
      return;
    }
    for (std::size_t w : adjacency[u]) {
      if (visited[w]) continue;
      const double next = std::max(descent, hm - heights[w]);
      if (next >= mindesc) continue;
      visited[w] = 1;
      self(self, w, next);
      visited[w] = 0;
    }
  };
  dfs(dfs, m, 0.0);
  return std::min(hm, mindesc);
}

/// Minimal descent via a maximize-the-minimum-height search: the frontier is
/// keyed by the smallest height seen along the path, settled largest first,
/// and the first settled vertex of at least equal height gives the answer.
/// Walks and simple paths agree here because any walk's height minimum is
/// already attained by the simple path inside it.
inline double prominence_bottleneck(const AdjacencyList& adjacency,
                                    const std::vector<double>& heights, std::size_t m) {
  detail::check_vertex(adjacency, m);
  const double hm = heights[m];
  std::vector<double> best(adjacency.size(), -std::numeric_limits<double>::infinity());
  std::vector<char> settled(adjacency.size(), 0);
  std::priority_queue<std::pair<double, std::size_t>> frontier;
  best[m] = hm;
  frontier.push({hm, m});
  while (!frontier.empty()) {
    const auto [bottleneck, u] = frontier.top();
    frontier.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u != m && heights[u] >= hm) return std::min(hm, hm - bottleneck);
    for (std::size_t w : adjacency[u]) {
      if (settled[w]) continue;
      const double next = std::min(bottleneck, heights[w]);
      if (next > best[w]) {
        best[w] = next;
        frontier.push({next, w});
      }
    }
  }
  return hm;  // no reachable vertex of at least equal height
}

/// All prominences in one descending sweep.  Vertices activate from highest
/// to lowest (ties by ascending index); union-find components track their
/// maximum height and the one vertex still awaiting a minimal-descent value.
/// When components meet at activation level L, every pending summit that is
/// no higher than the other side resolves to height - L: the merge is the
/// first moment it connects to an equal-or-higher vertex, hence L is the
/// best achievable bottleneck.  Vertices never resolved have no such vertex
/// anywhere in their component and keep their full height.
inline std::vector<double> prominence_all_sweep(const AdjacencyList& adjacency,
                                                const std::vector<double>& heights) {
  const std::size_t n = adjacency.size();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (heights[a] != heights[b]) return heights[a] > heights[b];
    return a < b;
  });

  DisjointSet components(n);
  std::vector<double> component_max(n, 0.0);
  std::vector<std::size_t> pending(n, kNone);
  std::vector<char> active(n, 0);
  std::vector<double> prom(n, -1.0);

  auto resolve = [&](std::size_t summit, double level) {
    const double mindesc = heights[summit] - level;
    prom[summit] = std::min(heights[summit], mindesc);
  };

  for (std::size_t v : order) {
    const double level = heights[v];
    component_max[v] = level;
    pending[v] = v;
    active[v] = 1;
    for (std::size_t w : adjacency[v]) {
      if (!active[w]) continue;
      std::size_t rv = components.find(v);
      std::size_t rw = components.find(w);
      if (rv == rw) continue;
      const double max_v = component_max[rv];
      const double max_w = component_max[rw];
      std::size_t survivor = kNone;
      if (max_v <= max_w && pending[rv] != kNone) resolve(pending[rv], level);
      else survivor = pending[rv];
      if (max_w <= max_v && pending[rw] != kNone) resolve(pending[rw], level);
      else if (survivor == kNone) survivor = pending[rw];
      const std::size_t root = components.unite_roots(rv, rw);
      component_max[root] = std::max(max_v, max_w);
      pending[root] = survivor;
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (prom[v] < 0.0) prom[v] = heights[v];
  return prom;
}

inline double prominence_bruteforce(const ThresholdGraph& g, std::size_t m,
                                    std::size_t oracle_bound = 12) {
  return prominence_bruteforce(g.adjacency(), g.heights(), m, oracle_bound);
}

inline double prominence_bottleneck(const ThresholdGraph& g, std::size_t m) {
  return prominence_bottleneck(g.adjacency(), g.heights(), m);
}

inline std::vector<double> prominence_all_sweep(const ThresholdGraph& g) {
  return prominence_all_sweep(g.adjacency(), g.heights());
}

/// Full valuation pass over a dataset.  With no delta given the minimal
/// threshold is used; explicit deltas below it are refused because the
/// limit construction behind metric-space prominence starts there.
inline OrometricScores enrich(const MetricDataset& ds, std::optional<double> delta = std::nullopt) {
  const double minimal = ds.minimal_threshold();
  const double used = delta.value_or(minimal);
  if (used < minimal)
    throw ValidationError("delta " + std::to_string(used) + " is below the minimal threshold " +
                          std::to_string(minimal));
  const ThresholdGraph graph = build_threshold_graph(ds, used);
  OrometricScores scores;
  scores.delta_used = used;
  scores.isolation = isolation_all(ds);
  scores.prominence = prominence_all_sweep(graph);
  scores.positive_prominence_count = static_cast<std::size_t>(
      std::count_if(scores.prominence.begin(), scores.prominence.end(),
                    [](double p) { return p > 0.0; }));
  return scores;
}

/// Prominence vectors for a list of thresholds at or above the minimal one;
/// edge sets only grow with delta, so the vectors must be pointwise
/// non-increasing along the list.
inline std::vector<std::vector<double>> prominence_monotonicity_probe(
    const MetricDataset& ds, const std::vector<double>& deltas) {
  const double minimal = ds.minimal_threshold();
  for (double d : deltas)
    if (d < minimal)
      throw ValidationError("probe delta " + std::to_string(d) + " is below the minimal threshold " +
                            std::to_string(minimal));
  std::vector<std::vector<double>> result;
  result.reserve(deltas.size());
  for (double d : deltas) result.push_back(prominence_all_sweep(build_threshold_graph(ds, d)));
  return result;
}

}  // namespace oromet
