#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oromet/error.hpp"
#include "oromet/metric_dataset.hpp"

namespace oromet {

/// The delta-step graph over a dataset: vertices are the points, and two
/// distinct points are adjacent iff their distance is at most delta.
/// Immutable once built.
class ThresholdGraph {
public:
  ThresholdGraph(const MetricDataset& dataset, double delta,
                 std::vector<std::vector<std::size_t>> adjacency)
      : dataset_(&dataset), delta_(delta), adjacency_(std::move(adjacency)) {}

  const MetricDataset& dataset() const { return *dataset_; }
  double delta() const { return delta_; }
  std::size_t size() const { return adjacency_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

  std::vector<double> heights() const {
    std::vector<double> h(dataset_->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = dataset_->height(i);
    return h;
  }

  std::size_t min_degree() const {
    std::size_t best = adjacency_.empty() ? 0 : adjacency_[0].size();
    for (const auto& nbrs : adjacency_) best = std::min(best, nbrs.size());
    return best;
  }

private:
  const MetricDataset* dataset_;
  double delta_;
  std::vector<std::vector<std::size_t>> adjacency_;  // per-vertex, sorted ascending
};

/// Quadratic pair scan; adjacency lists come out sorted by construction.
inline ThresholdGraph build_threshold_graph(const MetricDataset& ds, double delta) {
  if (!(delta >= 0.0))
    throw ValidationError("threshold delta must be nonnegative, got " + std::to_string(delta));
  const std::size_t n = ds.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ds.distance(i, j) <= delta) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
      }
    }
  }
  return ThresholdGraph(ds, delta, std::move(adjacency));
}

}  // namespace oromet
