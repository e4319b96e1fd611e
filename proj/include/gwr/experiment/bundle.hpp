#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/model.hpp"
#include "../core/serialize.hpp"
#include "../ingest/crime_type.hpp"
#include "../ingest/model_rows.hpp"
#include "../ingest/records.hpp"
#include "../ingest/standardize.hpp"
#include "../ingest/weather_table.hpp"
#include "evaluation.hpp"
#include "split.hpp"

namespace gwr {

inline constexpr int kBundleFormatVersion = 1;

/// Everything needed to answer risk queries: one FittedGWR per crime type,
/// the training rows they were fitted on, the GeoUnit table, feature
/// standardization constants and monthly temperature climatology.
class ModelBundle
{
public:
  std::string model_version;
  std::optional<int> year;
  FeatureLayout layout;
  Standardizer standardizer;
  std::vector<GeoUnit> geounits;
  std::array<std::optional<double>, 12> climatology{};
  double default_temp_f = 0.0;
  std::vector<ModelRow> training;

  const FittedGWR& model(CrimeType t) const { return models_.at(index_of(t)); }
  const GWRDataset& dataset(CrimeType t) const { return datasets_.at(index_of(t)); }
  std::size_t regression_points() const { return models_.empty() ? 0 : models_.front().locals().size(); }

  void set_models(std::vector<FittedGWR> models)
  {
    if (models.size() != kCrimeTypeCount)
      throw InvalidArgument("bundle needs one model per crime type");
    models_ = std::move(models);
    datasets_.clear();
    for (CrimeType t : kAllCrimeTypes)
      datasets_.push_back(to_dataset(training, t, standardizer));
  }

  /// Temperature used when a query does not supply one.
  double temperature_for_month(int month) const
  {
    const auto& c = climatology.at(static_cast<std::size_t>(month - 1));
    return c ? *c : default_temp_f;
  }

  nlohmann::ordered_json to_json() const
  {
    auto doc = body_json();
    nlohmann::ordered_json out;
    out["version"] = kBundleFormatVersion;
    out["model_version"] = model_version;
    for (auto& [k, v] : doc.items())
      out[k] = v;
    return out;
  }

  /// Content hash of everything except the version fields.
  std::string compute_version() const
  {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(body_json().dump())));
    return buf;
  }

  static ModelBundle from_json(const nlohmann::ordered_json& doc)
  {
    if (doc.at("version").get<int>() != kBundleFormatVersion)
      throw InvalidArgument("unsupported model bundle version");
    ModelBundle b;
    b.model_version = doc.at("model_version").get<std::string>();
    if (!doc.at("year").is_null())
      b.year = doc.at("year").get<int>();
    b.layout = FeatureLayout(doc.at("ethnicity_names").get<std::vector<std::string>>());
    if (b.layout.names() != doc.at("feature_names").get<std::vector<std::string>>())
      throw InvalidArgument("bundle feature names do not match the ethnicity layout");
    b.standardizer = Standardizer::from_json(doc.at("standardization"));
    const auto& clim = doc.at("climatology");
    for (std::size_t m = 0; m < 12; ++m)
      if (!clim.at(m).is_null())
        b.climatology[m] = clim.at(m).get<double>();
    b.default_temp_f = doc.at("default_temp_f").get<double>();
    for (const auto& g : doc.at("geounits")) {
      GeoUnit u;
      u.geoid = g.at("geoid").get<std::string>();
      u.centroid = GeoPoint(g.at("lon").get<double>(), g.at("lat").get<double>());
      u.population_density = g.at("population_density").get<double>();
      u.property_rate = g.at("property_rate").get<double>();
      u.median_age = g.at("median_age").get<double>();
      u.ethnicity_shares = g.at("ethnicity_shares").get<std::vector<double>>();
      b.geounits.push_back(std::move(u));
    }
    for (const auto& r : doc.at("training")) {
      ModelRow row;
      row.geoid = r.at("geoid").get<std::string>();
      row.location = GeoPoint(r.at("lon").get<double>(), r.at("lat").get<double>());
      row.year = r.at("year").get<int>();
      row.time_bucket = static_cast<TimeBucket>(r.at("time_bucket").get<int>());
      row.support = r.at("support").get<int>();
      row.features = r.at("features").get<std::vector<double>>();
      const auto counts = r.at("counts").get<std::vector<int>>();
      if (counts.size() != kCrimeTypeCount || row.support < 1)
        throw InvalidArgument("malformed training row in bundle");
      for (std::size_t t = 0; t < kCrimeTypeCount; ++t) {
        row.counts[t] = counts[t];
        row.responses[t] = static_cast<double>(counts[t]) / row.support;
      }
      b.training.push_back(std::move(row));
    }
    std::vector<FittedGWR> models;
    const auto& m = doc.at("models");
    for (CrimeType t : kAllCrimeTypes)
      models.push_back(model_from_json(m.at(std::string(key_of(t)))));
    b.set_models(std::move(models));
    return b;
  }

  static ModelBundle load(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw InvalidArgument("cannot open model bundle " + path);
    return from_json(nlohmann::ordered_json::parse(in));
  }

private:
  nlohmann::ordered_json body_json() const
  {
    nlohmann::ordered_json j;
    if (year)
      j["year"] = *year;
    else
      j["year"] = nullptr;
    j["feature_names"] = layout.names();
    j["ethnicity_names"] = layout.ethnicity_names();
    j["standardization"] = standardizer.to_json();
    auto clim = nlohmann::ordered_json::array();
    for (const auto& c : climatology)
      clim.push_back(c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr));
    j["climatology"] = std::move(clim);
    j["default_temp_f"] = default_temp_f;
    auto units = nlohmann::ordered_json::array();
    for (const auto& u : geounits) {
      nlohmann::ordered_json g;
      g["geoid"] = u.geoid;
      g["lon"] = u.centroid.lon();
      g["lat"] = u.centroid.lat();
      g["population_density"] = u.population_density;
      g["property_rate"] = u.property_rate;
      g["median_age"] = u.median_age;
      g["ethnicity_shares"] = u.ethnicity_shares;
      units.push_back(std::move(g));
    }
    j["geounits"] = std::move(units);
    nlohmann::ordered_json models;
    for (CrimeType t : kAllCrimeTypes)
      models[std::string(key_of(t))] = gwr::to_json(models_.at(index_of(t)));
    j["models"] = std::move(models);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : training) {
      nlohmann::ordered_json e;
      e["geoid"] = r.geoid;
      e["lon"] = r.location.lon();
      e["lat"] = r.location.lat();
      e["year"] = r.year;
      e["time_bucket"] = static_cast<int>(r.time_bucket);
      e["support"] = r.support;
      e["features"] = r.features;
      e["counts"] = std::vector<int>(r.counts.begin(), r.counts.end());
      rows.push_back(std::move(e));
    }
    j["training"] = std::move(rows);
    return j;
  }

  std::vector<FittedGWR> models_;
  std::vector<GWRDataset> datasets_;
};

struct BundleOptions
{
  BandwidthChoice bandwidth;
  std::optional<int> year;
};

/// Fits one model per crime type on `rows` (optionally restricted to one
/// year), with standardization statistics from those rows.
inline ModelBundle fit_bundle(std::span<const ModelRow> rows,
                              const FeatureLayout& layout,
                              std::span<const GeoUnit> units,
                              const WeatherTable& weather,
                              const BundleOptions& options)
{
  ModelBundle b;
  b.year = options.year;
  b.layout = layout;
  for (const auto& r : rows)
    if (!options.year || r.year == *options.year)
      b.training.push_back(r);
  if (b.training.empty())
    throw InvalidArgument("no model rows to fit");
  b.standardizer = Standardizer::fit(b.training, layout);
  b.geounits.assign(units.begin(), units.end());
  std::sort(b.geounits.begin(), b.geounits.end(),
            [](const GeoUnit& a, const GeoUnit& c) { return a.geoid < c.geoid; });
  b.climatology = weather.monthly_means();
  std::optional<double> base = options.year ? weather.yearly_mean(*options.year) : std::nullopt;
  if (!base)
    base = weather.overall_mean();
  b.default_temp_f = base.value_or(0.0);

  std::vector<FittedGWR> models;
  for (CrimeType t : kAllCrimeTypes) {
    const auto ds = to_dataset(b.training, t, b.standardizer);
    const double h = options.bandwidth.resolve(ds);
    models.push_back(fit(ds, KernelSpec(h), layout.names()));
  }
  b.set_models(std::move(models));
  b.model_version = b.compute_version();
  return b;
}

} // namespace gwr
