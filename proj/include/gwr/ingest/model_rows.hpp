#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/dataset.hpp"
#include "../core/errors.hpp"
#include "crime_type.hpp"
#include "records.hpp"
#include "weather_table.hpp"

namespace gwr {

/// Six-hour buckets; night is the reference level.
enum class TimeBucket
{
  night = 0,     // [00:00, 06:00)
  morning = 1,   // [06:00, 12:00)
  afternoon = 2, // [12:00, 18:00)
  evening = 3,   // [18:00, 24:00)
};

inline constexpr std::array<const char*, 4> kTimeBucketNames{"night", "morning", "afternoon", "evening"};

struct TimeOfDayFeatures
{
  TimeBucket bucket = TimeBucket::night;
  /// (morning, afternoon, evening) dummies.
  std::array<double, 3> indicators{};
};

inline TimeOfDayFeatures time_of_day_features(int hour)
{
  if (hour < 0 || hour > 23)
    throw InvalidArgument("hour must be in [0, 23]");
  TimeOfDayFeatures f;
  f.bucket = static_cast<TimeBucket>(hour / 6);
  if (f.bucket != TimeBucket::night)
    f.indicators[static_cast<std::size_t>(f.bucket) - 1] = 1.0;
  return f;
}

inline TimeOfDayFeatures time_of_day_features(const Timestamp& t) { return time_of_day_features(t.hour); }

/// Names and layout of the ModelRow feature vector:
/// intercept, population_density, property_rate, ethnicity shares 2..k,
/// median_age, morning, afternoon, evening, avg_temp_f.
class FeatureLayout
{
public:
  FeatureLayout() = default;

  explicit FeatureLayout(std::vector<std::string> ethnicity_names)
    : ethnicity_names_(std::move(ethnicity_names))
  {
    if (ethnicity_names_.empty())
      throw InvalidArgument("feature layout needs at least one ethnicity column");
    names_ = {"intercept", "population_density", "property_rate"};
    for (std::size_t i = 1; i < ethnicity_names_.size(); ++i)
      names_.push_back(ethnicity_names_[i]);
    names_.push_back("median_age");
    first_indicator_ = names_.size();
    names_.push_back("morning");
    names_.push_back("afternoon");
    names_.push_back("evening");
    names_.push_back("avg_temp_f");
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& ethnicity_names() const { return ethnicity_names_; }
  std::size_t size() const { return names_.size(); }

  /// Whether feature k is the intercept or a time-bucket dummy.
  bool is_indicator(std::size_t k) const
  {
    return k == 0 || (k >= first_indicator_ && k < first_indicator_ + 3);
  }

  std::size_t index_of(const std::string& name) const
  {
    for (std::size_t k = 0; k < names_.size(); ++k)
      if (names_[k] == name)
        return k;
    throw InvalidArgument("unknown feature name '" + name + "'");
  }

  std::vector<double> build(const GeoUnit& unit, int hour, double avg_temp_f) const
  {
    if (unit.ethnicity_shares.size() != ethnicity_names_.size())
      throw InvalidArgument("GeoUnit " + unit.geoid + " has a different number of ethnicity shares");
    std::vector<double> x{1.0, unit.population_density, unit.property_rate};
    for (std::size_t i = 1; i < unit.ethnicity_shares.size(); ++i)
      x.push_back(unit.ethnicity_shares[i]);
    x.push_back(unit.median_age);
    const auto tod = time_of_day_features(hour);
    x.insert(x.end(), tod.indicators.begin(), tod.indicators.end());
    x.push_back(avg_temp_f);
    return x;
  }

private:
  std::vector<std::string> ethnicity_names_;
  std::vector<std::string> names_;
  std::size_t first_indicator_ = 0;
};

/// One (geoid, year, time bucket) cell.
struct ModelRow
{
  std::string geoid;
  GeoPoint location;
  int year = 0;
  TimeBucket time_bucket = TimeBucket::night;
  std::vector<double> features;
  std::array<double, kCrimeTypeCount> responses{};
  std::array<int, kCrimeTypeCount> counts{};
  int support = 0;

  double response(CrimeType t) const { return responses[index_of(t)]; }
};

struct CoverageReport
{
  int min_support = 0;
  std::size_t incidents_total = 0;
  std::size_t cells_total = 0;
  std::size_t cells_kept = 0;
  std::size_t cells_below_min_support = 0;
  std::size_t incidents_in_dropped_cells = 0;
  std::vector<std::string> interpolated_weather_dates;

  nlohmann::ordered_json to_json() const
  {
    nlohmann::ordered_json j;
    j["min_support"] = min_support;
    j["incidents_total"] = incidents_total;
    j["cells_total"] = cells_total;
    j["cells_kept"] = cells_kept;
    j["cells_below_min_support"] = cells_below_min_support;
    j["incidents_in_dropped_cells"] = incidents_in_dropped_cells;
    j["interpolated_weather_dates"] = interpolated_weather_dates;
    return j;
  }
};

struct ModelRowOptions
{
  int min_support = 5;
};

struct ModelRowsResult
{
  FeatureLayout layout;
  std::vector<ModelRow> rows;
  CoverageReport coverage;
};

/// Aggregates incidents into (geoid, year, time bucket) cells. Output is
/// sorted by cell key and does not depend on input order.
inline ModelRowsResult build_model_rows(std::span<const CrimeIncident> incidents,
                                        std::span<const GeoUnit> units,
                                        const std::vector<std::string>& ethnicity_names,
                                        const WeatherTable& weather,
                                        ModelRowOptions options = {})
{
  std::map<std::string, const GeoUnit*> by_id;
  for (const auto& u : units)
    by_id.emplace(u.geoid, &u);

  std::set<std::string> unknown;
  for (const auto& inc : incidents)
    if (!by_id.count(inc.geoid))
      unknown.insert(inc.geoid);
  if (!unknown.empty())
    throw UnknownGeoID(std::vector<std::string>(unknown.begin(), unknown.end()));

  struct Cell
  {
    std::array<int, kCrimeTypeCount> counts{};
    std::map<std::chrono::sys_days, int> per_date;
  };
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, Cell> cells;
  for (const auto& inc : incidents) {
    const Key key{inc.geoid, year_of(inc.occurred_at.date),
                  static_cast<int>(time_of_day_features(inc.occurred_at).bucket)};
    auto& cell = cells[key];
    ++cell.counts[index_of(inc.crime_type)];
    ++cell.per_date[std::chrono::sys_days(inc.occurred_at.date)];
  }

  ModelRowsResult out;
  out.layout = FeatureLayout(ethnicity_names);
  out.coverage.min_support = options.min_support;
  out.coverage.incidents_total = incidents.size();
  out.coverage.cells_total = cells.size();

  std::set<std::chrono::sys_days> interpolated;
  for (const auto& [key, cell] : cells) {
    const auto& [geoid, year, bucket] = key;
    int support = 0;
    for (int c : cell.counts)
      support += c;
    double temp_sum = 0.0;
    for (const auto& [day, n] : cell.per_date) {
      const auto t = weather.temperature_on(Date(day));
      if (t.interpolated)
        interpolated.insert(day);
      temp_sum += n * t.avg_temp_f;
    }
    if (support < options.min_support) {
      ++out.coverage.cells_below_min_support;
      out.coverage.incidents_in_dropped_cells += static_cast<std::size_t>(support);
      continue;
    }
    const GeoUnit& unit = *by_id.at(geoid);
    ModelRow row;
    row.geoid = geoid;
    row.location = unit.centroid;
    row.year = year;
    row.time_bucket = static_cast<TimeBucket>(bucket);
    row.features = out.layout.build(unit, bucket * 6, temp_sum / support);
    row.counts = cell.counts;
    row.support = support;
    for (std::size_t t = 0; t < kCrimeTypeCount; ++t)
      row.responses[t] = static_cast<double>(cell.counts[t]) / support;
    out.rows.push_back(std::move(row));
  }
  out.coverage.cells_kept = out.rows.size();
  for (const auto& day : interpolated)
    out.coverage.interpolated_weather_dates.push_back(format_date(Date(day)));
  return out;
}

} // namespace gwr
