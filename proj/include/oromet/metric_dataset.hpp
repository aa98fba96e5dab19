#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "oromet/error.hpp"
#include "oromet/geo.hpp"

namespace oromet {

/// One element of the metric space: identity, height, optional position,
/// optional binary relevance label.
struct PointRecord {
  std::string id;
  std::string name;
  std::optional<GeoPoint> coordinates;
  double height = 0.0;
  std::optional<int> label;
};

/// Endpoints of the largest nearest-neighbor distance in the dataset.
struct NearestNeighborPair {
  std::size_t point = 0;     // the point whose nearest neighbor is farthest away
  std::size_t neighbor = 0;  // that nearest neighbor
  double distance = 0.0;
};

/// A finite bounded metric space with a nonnegative height per point.
/// Distances come either from an explicit symmetric matrix or from
/// great-circle geometry on the point coordinates.  Immutable after
/// construction except for the optional one-time matrix materialization,
/// so all queries are safe to run from concurrent readers.
class MetricDataset {
public:
  static MetricDataset with_geodesic_distances(std::vector<PointRecord> points) {
    MetricDataset ds(std::move(points));
    ds.geodesic_ = true;
    for (const auto& p : ds.points_) {
      if (!p.coordinates)
        throw ValidationError("point '" + p.id + "' lacks coordinates required by the geodesic distance provider");
      validate_coordinates(*p.coordinates);
    }
    return ds;
  }

  /// `matrix` is flattened row-major, size n*n.  Triangle inequality is only
  /// checked when `validate_triangle` is set; the O(n^3) cost is opt-in.
  static MetricDataset with_distance_matrix(std::vector<PointRecord> points,
                                            std::vector<double> matrix,
                                            bool validate_triangle = false) {
    MetricDataset ds(std::move(points));
    const std::size_t n = ds.size();
    if (matrix.size() != n * n)
      throw ValidationError("distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (matrix[i * n + i] != 0.0)
        throw ValidationError("distance matrix diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = matrix[i * n + j];
        if (!std::isfinite(d) || d < 0.0)
          throw ValidationError("distance matrix entries must be finite and nonnegative");
        if (matrix[j * n + i] != d)
          throw ValidationError("distance matrix must be symmetric");
      }
    }
    if (validate_triangle) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (matrix[i * n + j] > matrix[i * n + k] + matrix[k * n + j] + 1e-12)
              throw ValidationError("triangle inequality violated at (" + std::to_string(i) + "," +
                                    std::to_string(j) + "," + std::to_string(k) + ")");
    }
    ds.matrix_ = std::move(matrix);
    return ds;
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<PointRecord>& points() const { return points_; }
  const PointRecord& point(std::size_t i) const {
    check_index(i);
    return points_[i];
  }
  double height(std::size_t i) const { return point(i).height; }
  bool uses_geodesic() const { return geodesic_; }

  double distance(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    if (!matrix_.empty()) return matrix_[i * size() + j];
    return geodesic_distance_km(*points_[i].coordinates, *points_[j].coordinates);
  }

  /// Caches the full n*n geodesic matrix; a no-op for matrix datasets.
  /// Call before the repeated whole-matrix scans of the enrichment pipeline.
  void materialize_distance_matrix() {
    if (!matrix_.empty()) return;
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = geodesic_distance_km(*points_[i].coordinates, *points_[j].coordinates);
        m[i * n + j] = d;
        m[j * n + i] = d;
      }
    }
    matrix_ = std::move(m);
  }

  /// Largest distance from point m to any point of the dataset.
  double max_distance_from(std::size_t m) const {
    check_index(m);
    double best = 0.0;
    for (std::size_t j = 0; j < size(); ++j) best = std::max(best, distance(m, j));
    return best;
  }

  /// The minimal threshold: the largest nearest-neighbor distance, i.e. the
  /// smallest delta at which the threshold graph has no isolated vertex.
  double minimal_threshold() const { return minimal_threshold_pair().distance; }

  NearestNeighborPair minimal_threshold_pair() const {
    const std::size_t n = size();
    NearestNeighborPair result;
    result.distance = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      std::size_t arg = i;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = distance(i, j);
        if (d < nearest) {
          nearest = d;
          arg = j;
        }
      }
      if (nearest > result.distance) {
        result.distance = nearest;
        result.point = i;
        result.neighbor = arg;
      }
    }
    return result;
  }

private:
  explicit MetricDataset(std::vector<PointRecord> points) : points_(std::move(points)) {
    if (points_.size() < 2)
      throw ValidationError("a metric dataset needs at least 2 points, got " + std::to_string(points_.size()));
    std::unordered_set<std::string> ids;
    for (const auto& p : points_) {
      if (!(p.height >= 0.0))
        throw ValidationError("point '" + p.id + "' has negative height");
      if (!ids.insert(p.id).second)
        throw ValidationError("duplicate point id '" + p.id + "'");
    }
  }

  void check_index(std::size_t i) const {
    if (i >= points_.size())
      throw ValidationError("point index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(points_.size()) + ")");
  }

  std::vector<PointRecord> points_;
  std::vector<double> matrix_;  // empty until materialized for geodesic datasets
  bool geodesic_ = false;
};

}  // namespace oromet
