#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "oromet/metric_dataset.hpp"
#include "oromet/orometry.hpp"
#include "oromet/rng.hpp"
#include "oromet/threshold_graph.hpp"

// Randomized cross-checks of the prominence implementations against the
// path-enumeration oracle and against each other.  Exposed as a library so
// the `verify` subcommand and the acceptance suite run the same machinery.

namespace oromet::verify {

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Random planar points with an explicit Euclidean distance matrix and small
/// integer heights, so value comparisons across implementations are exact.
/// One point in ten is duplicated at distance zero.
inline MetricDataset random_euclidean_dataset(Rng& rng, std::size_t max_n) {
  const std::size_t n = 2 + rng.below(max_n - 1);
  std::vector<double> xs(n), ys(n);
  std::vector<PointRecord> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && rng.below(10) == 0) {
      xs[i] = xs[i - 1];
      ys[i] = ys[i - 1];
    } else {
      xs[i] = rng.uniform(0.0, 10.0);
      ys[i] = rng.uniform(0.0, 10.0);
    }
    points[i].id = "p" + std::to_string(i);
    points[i].name = points[i].id;
    points[i].height = static_cast<double>(rng.below(10));
  }
  std::vector<double> matrix(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      matrix[i * n + j] = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
  return MetricDataset::with_distance_matrix(std::move(points), std::move(matrix));
}

inline double random_delta_at_least_minimal(Rng& rng, const MetricDataset& ds) {
  const double minimal = ds.minimal_threshold();
  double diameter = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    diameter = std::max(diameter, ds.max_distance_from(i));
  switch (rng.below(3)) {
    case 0: return minimal;
    case 1: return minimal + rng.uniform() * std::max(0.0, diameter - minimal);
    default: return diameter + rng.uniform();  // complete graph
  }
}

/// Random connected graph: a random spanning tree plus extra edges.
inline AdjacencyList random_connected_graph(Rng& rng, std::size_t max_n) {
  const std::size_t n = 2 + rng.below(max_n - 1);
  AdjacencyList adjacency(n);
  auto connect = [&](std::size_t a, std::size_t b) {
    for (std::size_t w : adjacency[a])
      if (w == b) return;
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  };
  for (std::size_t v = 1; v < n; ++v) connect(v, rng.below(v));
  const std::size_t extra = rng.below(n);
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t a = rng.below(n);
    const std::size_t b = rng.below(n);
    if (a != b) connect(a, b);
  }
  for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
  return adjacency;
}

inline std::vector<double> random_integer_heights(Rng& rng, std::size_t n) {
  std::vector<double> h(n);
  for (auto& v : h) v = static_cast<double>(rng.below(10));
  return h;
}

/// All three prominence implementations must agree exactly, per vertex.
inline SuiteResult prominence_equivalence(std::size_t trials, std::size_t max_n,
                                          std::uint64_t seed) {
  SuiteResult result{"prominence equivalence (bruteforce = bottleneck = sweep)", trials, {}};
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto ds = random_euclidean_dataset(rng, max_n);
    const double delta = random_delta_at_least_minimal(rng, ds);
    const auto graph = build_threshold_graph(ds, delta);
    const auto heights = graph.heights();
    const auto swept = prominence_all_sweep(graph);
    for (std::size_t v = 0; v < ds.size(); ++v) {
      const double brute = prominence_bruteforce(graph.adjacency(), heights, v);
      const double bottleneck = prominence_bottleneck(graph.adjacency(), heights, v);
      if (brute != bottleneck || brute != swept[v]) {
        result.failures.push_back("trial " + std::to_string(t) + " vertex " + std::to_string(v) +
                                  ": bruteforce=" + std::to_string(brute) +
                                  " bottleneck=" + std::to_string(bottleneck) +
                                  " sweep=" + std::to_string(swept[v]));
      }
    }
  }
  return result;
}

/// Growing delta can only add edges and therefore paths, so prominence is
/// pointwise non-increasing in delta.
inline SuiteResult delta_monotonicity(std::size_t trials, std::size_t max_n, std::uint64_t seed) {
  SuiteResult result{"prominence monotonicity in delta", trials, {}};
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto ds = random_euclidean_dataset(rng, max_n);
    double d1 = random_delta_at_least_minimal(rng, ds);
    double d2 = random_delta_at_least_minimal(rng, ds);
    if (d2 < d1) std::swap(d1, d2);
    const auto vectors = prominence_monotonicity_probe(ds, {d1, d2});
    for (std::size_t v = 0; v < ds.size(); ++v) {
      if (vectors[1][v] > vectors[0][v]) {
        result.failures.push_back("trial " + std::to_string(t) + " vertex " + std::to_string(v) +
                                  ": prominence rose from " + std::to_string(vectors[0][v]) +
                                  " to " + std::to_string(vectors[1][v]) + " as delta grew");
      }
    }
  }
  return result;
}

namespace detail {

inline std::vector<int> component_ids(const AdjacencyList& adjacency) {
  std::vector<int> comp(adjacency.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adjacency.size(); ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t w : adjacency[u]) {
        if (comp[w] == -1) {
          comp[w] = next;
          queue.push_back(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace detail

/// The structural facts every prominence/isolation vector must satisfy.
inline SuiteResult structural_invariants(std::size_t trials, std::size_t max_n,
                                         std::uint64_t seed) {
  SuiteResult result{"structural invariants", trials, {}};
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto ds = random_euclidean_dataset(rng, max_n);
    const double minimal = ds.minimal_threshold();
    const double delta = random_delta_at_least_minimal(rng, ds);
    const auto graph = build_threshold_graph(ds, delta);
    const auto heights = graph.heights();
    const auto prom = prominence_all_sweep(graph);
    const auto iso = isolation_all(ds);
    auto fail = [&](const std::string& what) {
      result.failures.push_back("trial " + std::to_string(t) + ": " + what);
    };

    if (build_threshold_graph(ds, minimal).min_degree() < 1)
      fail("vertex without neighbor at the minimal threshold");

    const auto comp = detail::component_ids(graph.adjacency());
    for (std::size_t v = 0; v < ds.size(); ++v) {
      if (prom[v] > heights[v]) fail("prominence exceeds height at vertex " + std::to_string(v));
      bool higher_neighbor = false;
      for (std::size_t w : graph.neighbors(v))
        if (heights[w] >= heights[v]) higher_neighbor = true;
      if (higher_neighbor && prom[v] != 0.0)
        fail("vertex " + std::to_string(v) + " has an at-least-equal neighbor but prominence " +
             std::to_string(prom[v]));
      bool strict_max = true;
      for (std::size_t w = 0; w < ds.size(); ++w)
        if (w != v && comp[w] == comp[v] && heights[w] >= heights[v]) strict_max = false;
      if (strict_max && prom[v] != heights[v])
        fail("strict component maximum " + std::to_string(v) + " lost height");

      // isolation against a definitional rescan, tie handling included
      double nearest_peer = std::numeric_limits<double>::infinity();
      double farthest = 0.0;
      for (std::size_t w = 0; w < ds.size(); ++w) {
        if (w == v) continue;
        farthest = std::max(farthest, ds.distance(v, w));
        if (heights[w] >= heights[v])
          nearest_peer = std::min(nearest_peer, ds.distance(v, w));
      }
      const double expected = std::isfinite(nearest_peer) ? nearest_peer : farthest;
      if (iso[v] != expected)
        fail("isolation mismatch at vertex " + std::to_string(v) + ": got " +
             std::to_string(iso[v]) + " expected " + std::to_string(expected));
    }
  }
  return result;
}

/// On a connected graph, prominence computed directly must coincide with the
/// enrichment pipeline run on the graph's shortest-path metric, where the
/// minimal threshold is exactly 1.
inline SuiteResult graph_metric_coincidence(std::size_t graphs, std::size_t max_n,
                                            std::uint64_t seed) {
  SuiteResult result{"graph/metric prominence coincidence", graphs, {}};
  Rng rng(seed);
  for (std::size_t t = 0; t < graphs; ++t) {
    const auto adjacency = random_connected_graph(rng, max_n);
    const std::size_t n = adjacency.size();
    const auto heights = random_integer_heights(rng, n);

    std::vector<double> matrix(n * n, 0.0);  // BFS hop distances
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<double> dist(n, -1.0);
      dist[s] = 0.0;
      std::deque<std::size_t> queue{s};
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t w : adjacency[u]) {
          if (dist[w] < 0.0) {
            dist[w] = dist[u] + 1.0;
            queue.push_back(w);
          }
        }
      }
      for (std::size_t j = 0; j < n; ++j) matrix[s * n + j] = dist[j];
    }

    std::vector<PointRecord> points(n);
    for (std::size_t i = 0; i < n; ++i) {
      points[i].id = "v" + std::to_string(i);
      points[i].name = points[i].id;
      points[i].height = heights[i];
    }
    const auto ds = MetricDataset::with_distance_matrix(std::move(points), std::move(matrix));
    const auto scores = enrich(ds);
    if (scores.delta_used != 1.0) {
      result.failures.push_back("trial " + std::to_string(t) + ": minimal threshold " +
                                std::to_string(scores.delta_used) + " instead of 1");
      continue;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const double direct = prominence_bottleneck(adjacency, heights, v);
      if (direct != scores.prominence[v]) {
        result.failures.push_back("trial " + std::to_string(t) + " vertex " + std::to_string(v) +
                                  ": direct=" + std::to_string(direct) + " via metric=" +
                                  std::to_string(scores.prominence[v]));
      }
    }
  }
  return result;
}

}  // namespace oromet::verify
