#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/errors.hpp"
#include "../core/geo.hpp"
#include "../core/model.hpp"
#include "../experiment/bundle.hpp"
#include "../ingest/crime_type.hpp"

namespace gwr {

inline constexpr double kDefaultResolveRadiusKm = 1.0;

struct RiskQuery
{
  double lat = 0.0;
  double lon = 0.0;
  int hour = 0;
  int month = 1;
  std::optional<double> temp_f;

  void validate() const
  {
    if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0)
      throw InvalidArgument("lat must be in [-90, 90]");
    if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0)
      throw InvalidArgument("lon must be in [-180, 180]");
    if (hour < 0 || hour > 23)
      throw InvalidArgument("hour must be in [0, 23]");
    if (month < 1 || month > 12)
      throw InvalidArgument("month must be in [1, 12]");
    if (temp_f && !std::isfinite(*temp_f))
      throw InvalidArgument("temp_f must be finite");
  }
};

struct RiskReport
{
  RiskQuery query;
  double temp_f = 0.0;
  std::array<double, kCrimeTypeCount> probabilities{};
  std::array<double, kCrimeTypeCount> raw{};
  std::optional<std::string> geoid;
  PredictionMode mode = PredictionMode::refit_at_point;
  std::string model_version;
};

inline const GeoUnit& nearest_unit(const ModelBundle& bundle, const GeoPoint& p, double& distance)
{
  if (bundle.geounits.empty())
    throw InvalidArgument("model bundle has no GeoUnits");
  const GeoUnit* best = nullptr;
  distance = std::numeric_limits<double>::infinity();
  for (const auto& u : bundle.geounits) {
    const double d = distance_km(p, u.centroid);
    if (d < distance) {
      distance = d;
      best = &u;
    }
  }
  return *best;
}

/// Demographics come from the nearest GeoUnit. Within `radius_km` of its
/// centroid the point takes that GeoID and is predicted by averaging its
/// local fits; otherwise each model is refitted at the point.
inline RiskReport predict_risk(const ModelBundle& bundle, const RiskQuery& query,
                               double radius_km = kDefaultResolveRadiusKm)
{
  query.validate();
  const GeoPoint point(query.lon, query.lat);
  double distance = 0.0;
  const GeoUnit& unit = nearest_unit(bundle, point, distance);

  RiskReport report;
  report.query = query;
  report.model_version = bundle.model_version;
  report.temp_f = query.temp_f ? *query.temp_f : bundle.temperature_for_month(query.month);
  const auto x = bundle.standardizer.apply(bundle.layout.build(unit, query.hour, report.temp_f));

  const bool within = distance <= radius_km;
  if (within)
    report.geoid = unit.geoid;
  report.mode = within && !bundle.model(CrimeType::Larceny).locals_with_label(unit.geoid).empty()
                    ? PredictionMode::geoid_average
                    : PredictionMode::refit_at_point;

  for (CrimeType t : kAllCrimeTypes) {
    const auto i = index_of(t);
    report.raw[i] = predict(bundle.model(t), bundle.dataset(t), point, x, report.mode, unit.geoid);
    report.probabilities[i] = std::clamp(report.raw[i], 0.0, 1.0);
  }
  return report;
}

inline nlohmann::ordered_json to_json(const RiskReport& r)
{
  nlohmann::ordered_json j;
  j["lat"] = r.query.lat;
  j["lon"] = r.query.lon;
  j["hour"] = r.query.hour;
  j["month"] = r.query.month;
  j["temp_f"] = r.temp_f;
  nlohmann::ordered_json probs, raw;
  for (CrimeType t : kAllCrimeTypes) {
    probs[std::string(key_of(t))] = r.probabilities[index_of(t)];
    raw[std::string(key_of(t))] = r.raw[index_of(t)];
  }
  j["probabilities"] = std::move(probs);
  j["raw"] = std::move(raw);
  j["geoid"] = r.geoid ? nlohmann::ordered_json(*r.geoid) : nlohmann::ordered_json(nullptr);
  j["mode"] = std::string(to_string(r.mode));
  j["model_version"] = r.model_version;
  return j;
}

} // namespace gwr
