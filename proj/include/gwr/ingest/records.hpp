#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "../core/geo.hpp"
#include "crime_type.hpp"
#include "csv.hpp"
#include "timestamp.hpp"

namespace gwr {

struct CrimeIncident
{
  Timestamp occurred_at;
  std::string geoid;
  GeoPoint location;
  CrimeType crime_type = CrimeType::Larceny;
};

/// Demographic attributes of one small area.
struct GeoUnit
{
  std::string geoid;
  GeoPoint centroid;
  double population_density = 0.0;
  double property_rate = 0.0;
  std::vector<double> ethnicity_shares;
  double median_age = 0.0;
};

struct WeatherDay
{
  Date date;
  double avg_temp_f = 0.0;
  double snowfall_in = 0.0;
};

struct Reject
{
  std::size_t line_no = 0;
  std::string reason;
};

/// Accepted records plus the rows that were diverted, with the number of
/// data rows read (accepted + rejected).
template <class T>
struct ParseResult
{
  std::vector<T> records;
  std::vector<Reject> rejects;
  std::size_t rows_read = 0;
};

inline void write_rejects_csv(std::ostream& out, const std::vector<Reject>& rejects)
{
  out << "line_no,reason\n";
  for (const auto& r : rejects)
    out << r.line_no << ',' << csv::escape(r.reason) << '\n';
}

} // namespace gwr
