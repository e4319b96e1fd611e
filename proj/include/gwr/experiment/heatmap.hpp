#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/errors.hpp"
#include "../core/geo.hpp"
#include "../core/model.hpp"

namespace gwr {

/// Predicted probabilities on a resolution x resolution lattice. Row 0 is
/// the southern edge, column 0 the western edge. Empty cells had no
/// well-posed local fit.
struct HeatmapGrid
{
  BoundingBox bbox;
  std::size_t resolution = 0;
  std::vector<std::optional<double>> values;
  std::string crime_type;
  std::optional<int> year;

  std::optional<double> at(std::size_t row, std::size_t col) const { return values[row * resolution + col]; }

  GeoPoint cell_center(std::size_t row, std::size_t col) const
  {
    const double dlon = (bbox.max_lon - bbox.min_lon) / static_cast<double>(resolution);
    const double dlat = (bbox.max_lat - bbox.min_lat) / static_cast<double>(resolution);
    return GeoPoint(bbox.min_lon + (static_cast<double>(col) + 0.5) * dlon,
                    bbox.min_lat + (static_cast<double>(row) + 0.5) * dlat);
  }
};

using FeatureProvider = std::function<std::vector<double>(const GeoPoint&)>;

/// Refits the model at each cell centre and predicts with the features the
/// provider supplies for that point. Values are clamped to [0, 1].
inline HeatmapGrid heatmap(const FittedGWR& model,
                           const GWRDataset& training,
                           const BoundingBox& bbox,
                           std::size_t resolution,
                           const FeatureProvider& features_at,
                           std::string crime_type = {},
                           std::optional<int> year = std::nullopt)
{
  bbox.validate();
  if (resolution == 0)
    throw InvalidArgument("heat-map resolution must be positive");
  HeatmapGrid grid{bbox, resolution, {}, std::move(crime_type), year};
  grid.values.reserve(resolution * resolution);
  for (std::size_t r = 0; r < resolution; ++r)
    for (std::size_t c = 0; c < resolution; ++c) {
      const GeoPoint center = grid.cell_center(r, c);
      try {
        const double raw = predict_refit(model, training, center, features_at(center));
        grid.values.push_back(std::clamp(raw, 0.0, 1.0));
      } catch (const DegenerateFit&) {
        grid.values.push_back(std::nullopt);
      }
    }
  return grid;
}

/// GeoJSON FeatureCollection with one polygon per cell and property "p"
/// (null for empty cells).
inline nlohmann::ordered_json to_geojson(const HeatmapGrid& grid)
{
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["crime_type"] = grid.crime_type;
  if (grid.year)
    doc["year"] = *grid.year;
  else
    doc["year"] = nullptr;
  doc["resolution"] = grid.resolution;
  doc["bbox"] = {grid.bbox.min_lon, grid.bbox.min_lat, grid.bbox.max_lon, grid.bbox.max_lat};
  auto features = nlohmann::ordered_json::array();
  const double dlon = (grid.bbox.max_lon - grid.bbox.min_lon) / static_cast<double>(grid.resolution);
  const double dlat = (grid.bbox.max_lat - grid.bbox.min_lat) / static_cast<double>(grid.resolution);
  for (std::size_t r = 0; r < grid.resolution; ++r)
    for (std::size_t c = 0; c < grid.resolution; ++c) {
      const double w = grid.bbox.min_lon + static_cast<double>(c) * dlon;
      const double e = grid.bbox.min_lon + static_cast<double>(c + 1) * dlon;
      const double s = grid.bbox.min_lat + static_cast<double>(r) * dlat;
      const double n = grid.bbox.min_lat + static_cast<double>(r + 1) * dlat;
      nlohmann::ordered_json f;
      f["type"] = "Feature";
      f["geometry"] = {{"type", "Polygon"},
                       {"coordinates", {{{w, s}, {e, s}, {e, n}, {w, n}, {w, s}}}}};
      nlohmann::ordered_json props;
      props["row"] = r;
      props["col"] = c;
      if (const auto v = grid.at(r, c))
        props["p"] = *v;
      else
        props["p"] = nullptr;
      f["properties"] = std::move(props);
      features.push_back(std::move(f));
    }
  doc["features"] = std::move(features);
  return doc;
}

inline void export_geojson(const HeatmapGrid& grid, std::ostream& out)
{
  out << to_geojson(grid).dump() << '\n';
}

inline HeatmapGrid parse_geojson(std::istream& in)
{
  const auto doc = nlohmann::ordered_json::parse(in);
  if (doc.at("type") != "FeatureCollection")
    throw InvalidArgument("not a GeoJSON FeatureCollection");
  HeatmapGrid grid;
  grid.crime_type = doc.at("crime_type").get<std::string>();
  if (!doc.at("year").is_null())
    grid.year = doc.at("year").get<int>();
  grid.resolution = doc.at("resolution").get<std::size_t>();
  const auto& b = doc.at("bbox");
  grid.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
  grid.values.assign(grid.resolution * grid.resolution, std::nullopt);
  for (const auto& f : doc.at("features")) {
    const auto& props = f.at("properties");
    const auto r = props.at("row").get<std::size_t>();
    const auto c = props.at("col").get<std::size_t>();
    if (r >= grid.resolution || c >= grid.resolution)
      throw InvalidArgument("heat-map cell index out of range");
    if (!props.at("p").is_null())
      grid.values[r * grid.resolution + c] = props.at("p").get<double>();
  }
  return grid;
}

} // namespace gwr
