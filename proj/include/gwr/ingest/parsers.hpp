#pragma once

#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "../core/errors.hpp"
#include "column_map.hpp"
#include "csv.hpp"
#include "records.hpp"

namespace gwr {

/// Ethnicity shares summing inside this band are renormalized; outside it
/// the row is rejected.
inline constexpr double kShareSumLow = 0.98;
inline constexpr double kShareSumHigh = 1.02;

namespace detail {

inline csv::Header read_header(csv::Reader& reader, std::string_view what)
{
  auto rec = reader.next();
  if (!rec)
    throw EmptyInput(std::string(what) + ": input is empty (no header row)");
  return csv::Header(*rec);
}

inline const std::string& field_at(const csv::Record& rec, std::size_t i)
{
  static const std::string empty;
  return i < rec.fields.size() ? rec.fields[i] : empty;
}

} // namespace detail

inline ParseResult<CrimeIncident> parse_crimes(std::istream& in, const ColumnMap::Crimes& cols = {})
{
  csv::Reader reader(in);
  const auto header = detail::read_header(reader, "crimes");
  const auto i_time = header.require(cols.occurred_at, "crimes");
  const auto i_geoid = header.require(cols.geoid, "crimes");
  const auto i_lon = header.require(cols.lon, "crimes");
  const auto i_lat = header.require(cols.lat, "crimes");
  const auto i_type = header.require(cols.crime_type, "crimes");

  ParseResult<CrimeIncident> out;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec))
      continue;
    ++out.rows_read;
    auto reject = [&](std::string reason) { out.rejects.push_back({rec->line_no, std::move(reason)}); };

    const auto ts = parse_timestamp(csv::trim(detail::field_at(*rec, i_time)));
    if (!ts) {
      reject("unparseable timestamp '" + detail::field_at(*rec, i_time) + "'");
      continue;
    }
    const auto type = parse_crime_type(detail::field_at(*rec, i_type));
    if (!type) {
      reject("unknown crime type '" + detail::field_at(*rec, i_type) + "'");
      continue;
    }
    const std::string geoid = csv::trim(detail::field_at(*rec, i_geoid));
    if (geoid.empty()) {
      reject("missing geoid");
      continue;
    }
    const auto lon = csv::to_double(detail::field_at(*rec, i_lon));
    const auto lat = csv::to_double(detail::field_at(*rec, i_lat));
    if (!lon || !lat) {
      reject("missing or non-numeric coordinates");
      continue;
    }
    try {
      out.records.push_back({*ts, geoid, GeoPoint(*lon, *lat), *type});
    } catch (const InvalidArgument& e) {
      reject(e.what());
    }
  }
  return out;
}

/// GeoUnits plus the names of the ethnicity share columns, in file order.
struct DemographicsTable
{
  std::vector<std::string> ethnicity_names;
  ParseResult<GeoUnit> units;
};

inline DemographicsTable parse_demographics(std::istream& in, const ColumnMap::Demographics& cols = {})
{
  csv::Reader reader(in);
  const auto header = detail::read_header(reader, "demographics");
  const auto i_geoid = header.require(cols.geoid, "demographics");
  const auto i_lon = header.require(cols.lon, "demographics");
  const auto i_lat = header.require(cols.lat, "demographics");
  const auto i_density = header.require(cols.population_density, "demographics");
  const auto i_property = header.require(cols.property_rate, "demographics");
  const auto i_age = header.require(cols.median_age, "demographics");

  DemographicsTable table;
  std::vector<std::size_t> share_cols;
  for (std::size_t i = 0; i < header.names().size(); ++i) {
    const auto& name = header.names()[i];
    if (!cols.ethnicity_prefix.empty() && name.rfind(cols.ethnicity_prefix, 0) == 0) {
      share_cols.push_back(i);
      table.ethnicity_names.push_back(name);
    }
  }
  if (share_cols.empty())
    throw MalformedHeader("demographics: no ethnicity share columns (prefix '" + cols.ethnicity_prefix + "')");

  auto& out = table.units;
  std::set<std::string> seen;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec))
      continue;
    ++out.rows_read;
    auto reject = [&](std::string reason) { out.rejects.push_back({rec->line_no, std::move(reason)}); };

    GeoUnit unit;
    unit.geoid = csv::trim(detail::field_at(*rec, i_geoid));
    if (unit.geoid.empty()) {
      reject("missing geoid");
      continue;
    }
    if (seen.count(unit.geoid)) {
      reject("duplicate geoid " + unit.geoid);
      continue;
    }
    const auto lon = csv::to_double(detail::field_at(*rec, i_lon));
    const auto lat = csv::to_double(detail::field_at(*rec, i_lat));
    const auto density = csv::to_double(detail::field_at(*rec, i_density));
    const auto property = csv::to_double(detail::field_at(*rec, i_property));
    const auto age = csv::to_double(detail::field_at(*rec, i_age));
    if (!lon || !lat || !density || !property || !age) {
      reject("missing or non-numeric field");
      continue;
    }
    if (*density < 0 || *property < 0 || !(*age > 0)) {
      reject("population_density and property_rate must be >= 0, median_age > 0");
      continue;
    }
    bool bad_share = false;
    for (std::size_t c : share_cols) {
      const auto s = csv::to_double(detail::field_at(*rec, c));
      if (!s || *s < 0.0 || *s > 1.0) {
        bad_share = true;
        break;
      }
      unit.ethnicity_shares.push_back(*s);
    }
    if (bad_share) {
      reject("ethnicity share missing or outside [0, 1]");
      continue;
    }
    const double sum = std::accumulate(unit.ethnicity_shares.begin(), unit.ethnicity_shares.end(), 0.0);
    if (sum < kShareSumLow || sum > kShareSumHigh) {
      reject("ethnicity shares sum to " + std::to_string(sum) + ", outside [0.98, 1.02]");
      continue;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      for (double& s : unit.ethnicity_shares)
        s /= sum;
    try {
      unit.centroid = GeoPoint(*lon, *lat);
    } catch (const InvalidArgument& e) {
      reject(e.what());
      continue;
    }
    unit.population_density = *density;
    unit.property_rate = *property;
    unit.median_age = *age;
    seen.insert(unit.geoid);
    out.records.push_back(std::move(unit));
  }
  return table;
}

inline ParseResult<WeatherDay> parse_weather(std::istream& in, const ColumnMap::Weather& cols = {})
{
  csv::Reader reader(in);
  const auto header = detail::read_header(reader, "weather");
  const auto i_date = header.require(cols.date, "weather");
  const auto i_temp = header.require(cols.avg_temp_f, "weather");
  const auto i_snow = header.require(cols.snowfall_in, "weather");

  ParseResult<WeatherDay> out;
  std::set<Date> seen;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec))
      continue;
    ++out.rows_read;
    auto reject = [&](std::string reason) { out.rejects.push_back({rec->line_no, std::move(reason)}); };

    const auto date = parse_date(csv::trim(detail::field_at(*rec, i_date)));
    if (!date) {
      reject("unparseable date '" + detail::field_at(*rec, i_date) + "'");
      continue;
    }
    const auto temp = csv::to_double(detail::field_at(*rec, i_temp));
    const auto snow = csv::to_double(detail::field_at(*rec, i_snow));
    if (!temp || !snow) {
      reject("missing or non-numeric weather value");
      continue;
    }
    if (*temp < -60.0 || *temp > 130.0) {
      reject("avg_temp_f outside [-60, 130]");
      continue;
    }
    if (*snow < 0.0) {
      reject("negative snowfall");
      continue;
    }
    if (!seen.insert(*date).second) {
      reject("duplicate date " + format_date(*date));
      continue;
    }
    out.records.push_back({*date, *temp, *snow});
  }
  return out;
}

} // namespace gwr
