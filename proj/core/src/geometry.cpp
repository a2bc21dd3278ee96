#include "carpool/geometry.hpp"

#include <numbers>
#include <string>

#include "carpool/errors.hpp"

namespace carpool {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double ProjectionConfig::default_scale(double reference_lat_deg) {
  return kEarthRadiusKm * std::cos(reference_lat_deg * kDegToRad);
}

Point mercator_project(double lat_deg, double lon_deg, const ProjectionConfig& config) {
  if (!std::isfinite(lat_deg) || std::abs(lat_deg) >= kMaxMercatorLatitude) {
    throw ProjectionError("latitude " + std::to_string(lat_deg) +
                          " outside Mercator domain (|lat| < 85.06)");
  }
  if (!std::isfinite(lon_deg) || std::abs(lon_deg) > 180.0) {
    throw ProjectionError("longitude " + std::to_string(lon_deg) + " outside [-180, 180]");
  }
  const double lat = lat_deg * kDegToRad;
  const double dlon = (lon_deg - config.lon0_deg) * kDegToRad;
  return Point{config.scale * dlon + config.x_offset,
               config.scale * std::asinh(std::tan(lat)) +
                   config.y_offset};
}

}  // namespace carpool
