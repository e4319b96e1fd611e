#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace gwr {

/// Mean Earth radius (WGS-84 arithmetic mean), kilometers.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Geographic location in decimal degrees. Construction validates the range.
class GeoPoint
{
public:
  GeoPoint() = default;

  GeoPoint(double lon, double lat)
    : lon_(lon), lat_(lat)
  {
    if (!(lon >= -180.0 && lon <= 180.0) || !(lat >= -90.0 && lat <= 90.0))
      throw InvalidArgument("coordinates out of range: lon=" + std::to_string(lon) +
                            " lat=" + std::to_string(lat));
  }

  double lon() const { return lon_; }
  double lat() const { return lat_; }

  friend auto operator<=>(const GeoPoint&, const GeoPoint&) = default;

private:
  double lon_ = 0.0;
  double lat_ = 0.0;
};

/// Great-circle (haversine) distance in kilometers.
inline double distance_km(const GeoPoint& a, const GeoPoint& b)
{
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = a.lat() * deg;
  const double phi2 = b.lat() * deg;
  const double dphi = (b.lat() - a.lat()) * deg;
  const double dlambda = (b.lon() - a.lon()) * deg;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  if (h > 1.0)
    h = 1.0;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

/// Axis-aligned lon/lat rectangle.
struct BoundingBox
{
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  void validate() const
  {
    GeoPoint lo(min_lon, min_lat);
    GeoPoint hi(max_lon, max_lat);
    if (!(max_lon > min_lon) || !(max_lat > min_lat))
      throw InvalidArgument("bounding box must have positive extent");
  }

  bool contains(const GeoPoint& p) const
  {
    return p.lon() >= min_lon && p.lon() <= max_lon && p.lat() >= min_lat && p.lat() <= max_lat;
  }
};

} // namespace gwr
