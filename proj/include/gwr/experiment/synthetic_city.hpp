#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "../core/geo.hpp"
#include "../ingest/crime_type.hpp"
#include "../ingest/model_rows.hpp"
#include "../ingest/records.hpp"

namespace gwr {

/// Parameters of a synthetic city: GeoUnits on a jittered lattice, daily
/// weather with a seasonal cycle, and incidents whose type mix depends on
/// demographics, location, time of day and temperature.
struct CitySpec
{
  std::size_t n_geoids = 40;
  BoundingBox bbox{-77.70, 43.10, -77.50, 43.25};
  int first_year = 2011;
  int last_year = 2017;
  /// Mean incidents per GeoID and year at the median density.
  double mean_incidents = 60.0;
  std::uint64_t seed = 7;
};

struct SyntheticCity
{
  std::vector<std::string> ethnicity_names{"eth_white", "eth_black", "eth_other"};
  std::vector<GeoUnit> units;
  std::vector<WeatherDay> weather;
  std::vector<CrimeIncident> incidents;
};

namespace detail {

inline double hour_weight(int h)
{
  const double to_midnight = std::min(h, 24 - h);
  return 1.0 + 2.5 * std::exp(-to_midnight * to_midnight / 2.0) + 2.5 * std::exp(-(h - 12.0) * (h - 12.0) / 4.0) -
         0.6 * std::exp(-(h - 5.0) * (h - 5.0) / 2.0);
}

inline double season_weight(int day_of_year)
{
  const double d = day_of_year;
  return 1.0 + 0.4 * std::exp(-std::pow((d - 200.0) / 45.0, 2)) + 0.2 * std::exp(-std::pow((d - 300.0) / 20.0, 2));
}

} // namespace detail

inline SyntheticCity generate_city(const CitySpec& spec)
{
  using namespace std::chrono;
  spec.bbox.validate();
  if (spec.n_geoids < 4 || spec.last_year < spec.first_year || !(spec.mean_incidents > 0))
    throw InvalidArgument("invalid city spec");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticCity city;

  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.n_geoids))));
  std::vector<std::pair<double, double>> uv;
  for (std::size_t i = 0; i < spec.n_geoids; ++i) {
    const double u01 = (static_cast<double>(i % side) + 0.2 + 0.6 * unit(rng)) / static_cast<double>(side);
    const double v01 = (static_cast<double>(i / side) + 0.2 + 0.6 * unit(rng)) / static_cast<double>(side);
    uv.emplace_back(u01, v01);
    GeoUnit g;
    char id[16];
    std::snprintf(id, sizeof id, "G%03zu", i + 1);
    g.geoid = id;
    g.centroid = GeoPoint(spec.bbox.min_lon + u01 * (spec.bbox.max_lon - spec.bbox.min_lon),
                          spec.bbox.min_lat + v01 * (spec.bbox.max_lat - spec.bbox.min_lat));
    const double r2 = (u01 - 0.5) * (u01 - 0.5) + (v01 - 0.5) * (v01 - 0.5);
    g.population_density = (1500.0 + 3500.0 * std::exp(-r2 / 0.08)) * std::exp(0.15 * normal(rng));
    g.property_rate = (60000.0 + 180000.0 * (0.6 * u01 + 0.4 * v01)) * std::exp(0.1 * normal(rng));
    double a = std::max(0.05, 0.3 + 0.4 * u01 + 0.05 * normal(rng));
    double b = std::max(0.05, 0.5 - 0.3 * u01 + 0.05 * normal(rng));
    double c = std::max(0.05, 0.2 + 0.03 * normal(rng));
    const double s = a + b + c;
    g.ethnicity_shares = {a / s, b / s, c / s};
    g.median_age = std::max(18.0, 28.0 + 12.0 * v01 + 2.0 * normal(rng));
    city.units.push_back(std::move(g));
  }

  const sys_days first{year(spec.first_year) / January / 1};
  const sys_days last{year(spec.last_year) / December / 31};
  std::size_t index = 0;
  for (sys_days d = first; d <= last; d += days(1), ++index) {
    const year_month_day ymd(d);
    const auto doy = (d - sys_days(ymd.year() / January / 1)).count() + 1;
    double temp = 48.0 - 24.0 * std::cos(2.0 * std::numbers::pi * (doy - 15.0) / 365.25) + 6.0 * normal(rng);
    temp = std::clamp(temp, -20.0, 100.0);
    const double snow = temp < 32.0 ? std::max(0.0, 1.0 + 2.0 * normal(rng)) : 0.0;
    // Leave occasional interior days unrecorded.
    if (d != first && d != last && index % 53 == 26)
      continue;
    city.weather.push_back({ymd, std::round(temp * 10.0) / 10.0, std::round(snow * 10.0) / 10.0});
  }
  auto temp_on = [&](sys_days d) {
    // Seasonal mean; the incident model does not need the day's noise.
    const year_month_day ymd(d);
    const auto doy = (d - sys_days(ymd.year() / January / 1)).count() + 1;
    return 48.0 - 24.0 * std::cos(2.0 * std::numbers::pi * (doy - 15.0) / 365.25);
  };

  double mean_density = 0.0, mean_property = 0.0;
  for (const auto& g : city.units) {
    mean_density += g.population_density;
    mean_property += g.property_rate;
  }
  mean_density /= static_cast<double>(city.units.size());
  mean_property /= static_cast<double>(city.units.size());

  std::vector<double> hour_w;
  for (int h = 0; h < 24; ++h)
    hour_w.push_back(detail::hour_weight(h));
  std::discrete_distribution<int> hour_dist(hour_w.begin(), hour_w.end());
  std::uniform_int_distribution<int> minute_dist(0, 59);
  std::uniform_real_distribution<double> jitter(-0.002, 0.002);

  for (int y = spec.first_year; y <= spec.last_year; ++y) {
    const sys_days jan1{year(y) / January / 1};
    const auto n_days = (sys_days{year(y + 1) / January / 1} - jan1).count();
    std::vector<double> day_w;
    for (int d = 1; d <= n_days; ++d)
      day_w.push_back(detail::season_weight(d));
    std::discrete_distribution<int> day_dist(day_w.begin(), day_w.end());

    for (std::size_t gi = 0; gi < city.units.size(); ++gi) {
      const auto& g = city.units[gi];
      const auto [u01, v01] = uv[gi];
      const double z_density = g.population_density / mean_density - 1.0;
      const double z_property = g.property_rate / mean_property - 1.0;
      std::poisson_distribution<int> count_dist(spec.mean_incidents * (0.5 + 0.5 * g.population_density / mean_density));
      const int n = count_dist(rng);
      for (int k = 0; k < n; ++k) {
        const sys_days day = jan1 + days(day_dist(rng));
        const int hour = hour_dist(rng);
        const int minute = minute_dist(rng);
        const auto bucket = time_of_day_features(hour).bucket;
        const double temp = temp_on(day);

        std::array<double, kCrimeTypeCount> logit{0.0, 0.3, 1.2, -0.2, -3.0, -0.3};
        logit[index_of(CrimeType::Burglary)] += -1.2 * z_property;
        logit[index_of(CrimeType::Larceny)] += 0.8 * z_property + 0.01 * (temp - 50.0);
        logit[index_of(CrimeType::Robbery)] += 0.8 * (0.5 - u01);
        logit[index_of(CrimeType::AggravatedAssault)] += 0.6 * z_density + 0.3 * (v01 - 0.5);
        if (bucket == TimeBucket::night) {
          logit[index_of(CrimeType::AggravatedAssault)] += 0.4;
          logit[index_of(CrimeType::Robbery)] += 0.5;
        } else if (bucket == TimeBucket::afternoon) {
          logit[index_of(CrimeType::Larceny)] += 0.3;
          logit[index_of(CrimeType::Burglary)] += 0.3;
        }
        std::array<double, kCrimeTypeCount> w{};
        for (std::size_t t = 0; t < kCrimeTypeCount; ++t)
          w[t] = std::exp(logit[t]);
        std::discrete_distribution<int> type_dist(w.begin(), w.end());
        const auto type = static_cast<CrimeType>(type_dist(rng));

        const GeoPoint loc(g.centroid.lon() + jitter(rng), g.centroid.lat() + jitter(rng));
        city.incidents.push_back({{year_month_day(day), hour, minute}, g.geoid, loc, type});
      }
    }
  }
  return city;
}

inline void write_crimes_csv(std::ostream& out, const std::vector<CrimeIncident>& incidents)
{
  out << "occurred_at,geoid,lon,lat,crime_type\n";
  char buf[128];
  for (const auto& i : incidents) {
    std::snprintf(buf, sizeof buf, "%s %02d:%02d,%s,%.6f,%.6f,", format_date(i.occurred_at.date).c_str(),
                  i.occurred_at.hour, i.occurred_at.minute, i.geoid.c_str(), i.location.lon(), i.location.lat());
    out << buf << display_name(i.crime_type) << '\n';
  }
}

inline void write_demographics_csv(std::ostream& out, const SyntheticCity& city)
{
  out << "geoid,lon,lat,population_density,property_rate,median_age";
  for (const auto& n : city.ethnicity_names)
    out << ',' << n;
  out << '\n';
  char buf[160];
  for (const auto& g : city.units) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.1f,%.0f,%.1f", g.geoid.c_str(), g.centroid.lon(),
                  g.centroid.lat(), g.population_density, g.property_rate, g.median_age);
    out << buf;
    for (double s : g.ethnicity_shares) {
      std::snprintf(buf, sizeof buf, ",%.6f", s);
      out << buf;
    }
    out << '\n';
  }
}

inline void write_weather_csv(std::ostream& out, const std::vector<WeatherDay>& days)
{
  out << "date,avg_temp_f,snowfall_in\n";
  char buf[64];
  for (const auto& d : days) {
    std::snprintf(buf, sizeof buf, "%s,%.1f,%.1f\n", format_date(d.date).c_str(), d.avg_temp_f, d.snowfall_in);
    out << buf;
  }
}

} // namespace gwr
