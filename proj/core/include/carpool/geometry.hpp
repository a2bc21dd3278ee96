#pragma once

#include <cmath>

namespace carpool {

/// A location on the projected plane.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double manhattan(const Point& a, const Point& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

/// Spherical Mercator parameters. Coordinates in the MIP are
/// scale * (radians) plus an offset; the default scale makes one unit
/// roughly one kilometre at `reference_lat_deg`.
struct ProjectionConfig {
  double lon0_deg = 104.06;
  double reference_lat_deg = 30.66;
  double scale = default_scale(30.66);
  double x_offset = 0.0;
  double y_offset = 0.0;

  static constexpr double kEarthRadiusKm = 6371.0088;
  static double default_scale(double reference_lat_deg);
};

/// Latitude beyond which the projection is refused (the usual web-map cutoff).
inline constexpr double kMaxMercatorLatitude = 85.06;

/// Throws ProjectionError when |lat| >= 85.06 or |lon| > 180.
Point mercator_project(double lat_deg, double lon_deg, const ProjectionConfig& config);

}  // namespace carpool
