#pragma once

#include <cmath>
#include <string>

#include "oromet/error.hpp"

namespace oromet {

/// IUGG mean Earth radius, kilometers.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

inline void validate_coordinates(const GeoPoint& p) {
  if (!(p.lat_deg >= -90.0 && p.lat_deg <= 90.0))
    throw ValidationError("latitude out of range [-90, 90]: " + std::to_string(p.lat_deg));
  if (!(p.lon_deg >= -180.0 && p.lon_deg <= 180.0))
    throw ValidationError("longitude out of range [-180, 180]: " + std::to_string(p.lon_deg));
}

/// Great-circle (haversine) distance in kilometers on a sphere of radius
/// kEarthRadiusKm.  Symmetric; zero iff both coordinates are identical.
inline double geodesic_distance_km(const GeoPoint& a, const GeoPoint& b) {
  validate_coordinates(a);
  validate_coordinates(b);
  constexpr double deg = M_PI / 180.0;
  const double lat1 = a.lat_deg * deg;
  const double lat2 = b.lat_deg * deg;
  const double dlat = (b.lat_deg - a.lat_deg) * deg;
  const double dlon = (b.lon_deg - a.lon_deg) * deg;
  const double sl = std::sin(dlat / 2.0);
  const double so = std::sin(dlon / 2.0);
  const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace oromet
