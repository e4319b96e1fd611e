#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gwr/ingest.hpp"

using namespace gwr;

namespace {

const char* kDemographics =
  "geoid,lon,lat,population_density,property_rate,median_age,eth_white,eth_black,eth_other\n"
  "A,-77.61,43.16,2500,120000,34,0.5,0.3,0.2\n"
  "B,-77.58,43.18,4000,80000,29,0.4,0.4,0.2\n"
  "C,-77.64,43.12,1200,210000,41,0.7,0.1,0.2\n";

const char* kWeather =
  "date,avg_temp_f,snowfall_in\n"
  "2015-07-01,70,0\n"
  "2015-07-02,72,0\n"
  "2015-07-03,74,0\n"
  "2015-07-05,78,0\n";

std::string crime_line(const std::string& ts, const std::string& geoid, const std::string& type)
{
  return ts + "," + geoid + ",-77.6,43.15," + type + "\n";
}

// 27 incidents across three GeoIDs, counted by hand:
//   A 2015 afternoon: 4 Larceny, 3 Burglary, 2 Robbery, 1 Murder (10)
//   A 2015 night:     3 Larceny (below min support)
//   B 2015 afternoon: 6 Motor Vehicle Theft (3 on 07-01, 3 on 07-04)
//   C 2015 afternoon: 2 Aggravated Assault, 2 Larceny, 4 Burglary (8)
std::string three_geoid_crimes()
{
  std::string s = "occurred_at,geoid,lon,lat,crime_type\n";
  for (int i = 0; i < 4; ++i)
    s += crime_line("2015-07-02 13:00", "A", "Larceny");
  for (int i = 0; i < 3; ++i)
    s += crime_line("2015-07-02 14:30", "A", "Burglary");
  for (int i = 0; i < 2; ++i)
    s += crime_line("2015-07-03 12:00", "A", "Robbery");
  s += crime_line("2015-07-03 17:59", "A", "Murder");
  for (int i = 0; i < 3; ++i)
    s += crime_line("2015-07-01 02:00", "A", "Larceny");
  for (int i = 0; i < 3; ++i)
    s += crime_line("2015-07-01 15:00", "B", "Motor Vehicle Theft");
  for (int i = 0; i < 3; ++i)
    s += crime_line("2015-07-04 15:00", "B", "MotorVehicleTheft");
  for (int i = 0; i < 2; ++i)
    s += crime_line("2015-07-05 16:00", "C", "Aggravated Assault");
  for (int i = 0; i < 2; ++i)
    s += crime_line("2015-07-05 16:00", "C", "larceny");
  for (int i = 0; i < 4; ++i)
    s += crime_line("2015-07-05 16:00", "C", "BURGLARY");
  return s;
}

struct Fixture
{
  ParseResult<CrimeIncident> crimes;
  DemographicsTable demo;
  ParseResult<WeatherDay> weather;
};

Fixture load_fixture()
{
  std::istringstream c(three_geoid_crimes()), d(kDemographics), w(kWeather);
  return {parse_crimes(c), parse_demographics(d), parse_weather(w)};
}

const ModelRow& find_row(const std::vector<ModelRow>& rows, const std::string& geoid, TimeBucket b)
{
  auto it = std::find_if(rows.begin(), rows.end(),
                         [&](const ModelRow& r) { return r.geoid == geoid && r.time_bucket == b; });
  if (it == rows.end())
    throw std::runtime_error("row not found");
  return *it;
}

} // namespace

TEST(ParseCrimes, HeaderOnlyIsEmpty)
{
  std::istringstream in("occurred_at,geoid,lon,lat,crime_type\n");
  const auto r = parse_crimes(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.rejects.empty());
  EXPECT_EQ(r.rows_read, 0u);
}

TEST(ParseCrimes, MapsFields)
{
  std::istringstream in("occurred_at,geoid,lon,lat,crime_type\n2015-07-04 00:15,140,-77.6,43.1,Larceny\n");
  const auto r = parse_crimes(in);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].crime_type, CrimeType::Larceny);
  EXPECT_EQ(r.records[0].occurred_at.hour, 0);
  EXPECT_EQ(r.records[0].occurred_at.minute, 15);
  EXPECT_EQ(r.records[0].geoid, "140");
}

TEST(ParseCrimes, CorruptTimestampIsRejectedWithLineNumber)
{
  std::istringstream in("occurred_at,geoid,lon,lat,crime_type\n"
                        "2015-07-04 00:15,1,-77.6,43.1,Larceny\n"
                        "2015-07-04 01:15,1,-77.6,43.1,Robbery\n"
                        "2015-13-04 02:15,1,-77.6,43.1,Murder\n"
                        "2015-07-05 03:15,2,-77.6,43.1,Burglary\n"
                        "2015-07-06 04:15,2,-77.6,43.1,Larceny\n");
  const auto r = parse_crimes(in);
  EXPECT_EQ(r.records.size(), 4u);
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].line_no, 4u);
  EXPECT_NE(r.rejects[0].reason.find("timestamp"), std::string::npos);
  EXPECT_EQ(r.records.size() + r.rejects.size(), r.rows_read);
}

TEST(ParseCrimes, RejectsUnknownTypeAndMissingCoordinates)
{
  std::istringstream in("occurred_at,geoid,lon,lat,crime_type\n"
                        "2015-07-04 00:15,1,-77.6,43.1,Arson\n"
                        "2015-07-04 00:15,1,,43.1,Larceny\n"
                        "2015-07-04 00:15,1,-277.6,43.1,Larceny\n"
                        "2015-07-04 00:15,,-77.6,43.1,Larceny\n"
                        "\"2015-07-04 00:15\",\"1\",-77.6,43.1,\"Motor Vehicle Theft\"\n");
  const auto r = parse_crimes(in);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.rejects.size(), 4u);
  EXPECT_EQ(r.records[0].crime_type, CrimeType::MotorVehicleTheft);
  std::ostringstream out;
  write_rejects_csv(out, r.rejects);
  EXPECT_EQ(out.str().substr(0, 15), "line_no,reason\n");
}

TEST(ParseCrimes, HeaderErrors)
{
  std::istringstream empty("");
  EXPECT_THROW(parse_crimes(empty), EmptyInput);
  std::istringstream bad("occurred_at,geoid,lon,lat\n");
  EXPECT_THROW(parse_crimes(bad), MalformedHeader);
}

TEST(ParseCrimes, ColumnMappingConfig)
{
  std::istringstream cfg("# RPD export\n[crimes]\noccurred_at = \"OccurredFrom Timestamp\"\ncrime_type = \"Statute_Text\"\n");
  const auto map = ColumnMap::from_config(KeyValueConfig::parse(cfg));
  std::istringstream in("OccurredFrom Timestamp,geoid,lon,lat,Statute_Text\n2016-01-01T23:00:00,9,-77.6,43.1,Robbery\n");
  const auto r = parse_crimes(in, map.crimes);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].occurred_at.hour, 23);
}

TEST(ParseDemographics, ShareNormalization)
{
  std::istringstream in("geoid,lon,lat,population_density,property_rate,median_age,eth_a,eth_b,eth_c\n"
                        "X,-77.6,43.1,10,10,30,0.5,0.3,0.2\n"
                        "Y,-77.6,43.1,10,10,30,0.50,0.30,0.21\n"
                        "Z,-77.6,43.1,10,10,30,0.5,0.3,0.5\n");
  const auto t = parse_demographics(in);
  ASSERT_EQ(t.units.records.size(), 2u);
  EXPECT_EQ(t.units.records[0].ethnicity_shares, (std::vector<double>{0.5, 0.3, 0.2}));
  const auto& y = t.units.records[1].ethnicity_shares;
  EXPECT_NEAR(y[0] + y[1] + y[2], 1.0, 1e-12);
  EXPECT_NEAR(y[2], 0.21 / 1.01, 1e-12);
  ASSERT_EQ(t.units.rejects.size(), 1u);
  EXPECT_EQ(t.units.rejects[0].line_no, 4u);
  EXPECT_EQ(t.ethnicity_names, (std::vector<std::string>{"eth_a", "eth_b", "eth_c"}));
}

TEST(ParseDemographics, RejectsInvalidValues)
{
  std::istringstream in("geoid,lon,lat,population_density,property_rate,median_age,eth_a,eth_b\n"
                        "X,-77.6,43.1,-1,10,30,0.5,0.5\n"
                        "Y,-77.6,43.1,10,10,0,0.5,0.5\n"
                        "W,-77.6,43.1,10,10,30,1.5,-0.5\n"
                        "V,-77.6,43.1,10,10,30,0.5,0.5\n"
                        "V,-77.6,43.1,10,10,30,0.5,0.5\n");
  const auto t = parse_demographics(in);
  EXPECT_EQ(t.units.records.size(), 1u);
  EXPECT_EQ(t.units.rejects.size(), 4u);
  EXPECT_EQ(t.units.rows_read, 5u);
}

TEST(ParseDemographics, NeedsEthnicityColumns)
{
  std::istringstream in("geoid,lon,lat,population_density,property_rate,median_age\n");
  EXPECT_THROW(parse_demographics(in), MalformedHeader);
}

TEST(ParseWeather, RejectsOutOfRange)
{
  std::istringstream in("date,avg_temp_f,snowfall_in\n"
                        "2015-01-01,20,3\n"
                        "2015-01-02,140,0\n"
                        "2015-01-03,20,-1\n"
                        "01/04/2015,20,0\n"
                        "2015-01-01,21,0\n");
  const auto r = parse_weather(in);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.rejects.size(), 4u);
}

TEST(WeatherTable, InterpolatesInteriorGaps)
{
  std::istringstream in(kWeather);
  const auto days = parse_weather(in).records;
  const WeatherTable table(days);
  using namespace std::chrono;
  const auto exact = table.temperature_on(2015y / July / 2d);
  EXPECT_EQ(exact.avg_temp_f, 72.0);
  EXPECT_FALSE(exact.interpolated);
  const auto mid = table.temperature_on(2015y / July / 4d);
  EXPECT_DOUBLE_EQ(mid.avg_temp_f, 76.0);
  EXPECT_TRUE(mid.interpolated);
  EXPECT_THROW(table.temperature_on(2015y / June / 30d), WeatherGap);
  EXPECT_THROW(table.temperature_on(2015y / July / 6d), WeatherGap);
  EXPECT_DOUBLE_EQ(*table.monthly_means()[6], (70.0 + 72 + 74 + 78) / 4);
  EXPECT_FALSE(table.monthly_means()[0].has_value());
}

TEST(TimeOfDay, Buckets)
{
  EXPECT_EQ(time_of_day_features(0).bucket, TimeBucket::night);
  EXPECT_EQ(time_of_day_features(0).indicators, (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(time_of_day_features(12).bucket, TimeBucket::afternoon);
  EXPECT_EQ(time_of_day_features(12).indicators, (std::array<double, 3>{0, 1, 0}));
  EXPECT_EQ(time_of_day_features(Timestamp{{}, 5, 59}).bucket, TimeBucket::night);
  EXPECT_EQ(time_of_day_features(6).bucket, TimeBucket::morning);
  EXPECT_EQ(time_of_day_features(23).indicators, (std::array<double, 3>{0, 0, 1}));
  EXPECT_THROW(time_of_day_features(24), InvalidArgument);
}

TEST(BuildModelRows, HandCountedThreeGeoidFixture)
{
  const auto f = load_fixture();
  ASSERT_EQ(f.crimes.records.size(), 27u);
  const WeatherTable weather(f.weather.records);
  const auto result = build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather);
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_EQ(result.coverage.cells_total, 4u);
  EXPECT_EQ(result.coverage.cells_below_min_support, 1u);
  EXPECT_EQ(result.coverage.incidents_in_dropped_cells, 3u);
  EXPECT_EQ(result.coverage.interpolated_weather_dates, (std::vector<std::string>{"2015-07-04"}));

  const auto& a = find_row(result.rows, "A", TimeBucket::afternoon);
  EXPECT_EQ(a.support, 10);
  EXPECT_EQ(a.response(CrimeType::Larceny), 0.4);
  EXPECT_EQ(a.response(CrimeType::Burglary), 0.3);
  EXPECT_EQ(a.response(CrimeType::Robbery), 0.2);
  EXPECT_EQ(a.response(CrimeType::Murder), 0.1);
  EXPECT_EQ(a.response(CrimeType::AggravatedAssault), 0.0);
  // 7 incidents on 07-02 (72F), 3 on 07-03 (74F).
  EXPECT_DOUBLE_EQ(a.features.back(), (7 * 72.0 + 3 * 74.0) / 10);

  const auto& b = find_row(result.rows, "B", TimeBucket::afternoon);
  EXPECT_EQ(b.response(CrimeType::MotorVehicleTheft), 1.0);
  for (CrimeType t : kAllCrimeTypes) {
    if (t != CrimeType::MotorVehicleTheft) {
      EXPECT_EQ(b.response(t), 0.0);
    }
  }
  EXPECT_DOUBLE_EQ(b.features.back(), 73.0);

  const auto& c = find_row(result.rows, "C", TimeBucket::afternoon);
  EXPECT_EQ(c.response(CrimeType::AggravatedAssault), 0.25);
  EXPECT_EQ(c.response(CrimeType::Larceny), 0.25);
  EXPECT_EQ(c.response(CrimeType::Burglary), 0.5);

  // Feature layout: intercept, density, property, eth_black, eth_other, age, 3 dummies, temp.
  EXPECT_EQ(result.layout.names(),
            (std::vector<std::string>{"intercept", "population_density", "property_rate", "eth_black", "eth_other",
                                      "median_age", "morning", "afternoon", "evening", "avg_temp_f"}));
  EXPECT_EQ(c.features, (std::vector<double>{1, 1200, 210000, 0.1, 0.2, 41, 0, 1, 0, 78}));
}

TEST(BuildModelRows, PartitionInvariantAndOrderIndependence)
{
  auto f = load_fixture();
  const WeatherTable weather(f.weather.records);
  const auto a = build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather, {1});
  std::mt19937_64 rng(4);
  std::shuffle(f.crimes.records.begin(), f.crimes.records.end(), rng);
  const auto b = build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather, {1});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].features, b.rows[i].features);
    EXPECT_EQ(a.rows[i].responses, b.rows[i].responses);
    double sum = 0;
    int count_sum = 0;
    for (std::size_t t = 0; t < kCrimeTypeCount; ++t) {
      sum += a.rows[i].responses[t];
      count_sum += a.rows[i].counts[t];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(count_sum, a.rows[i].support);
  }
}

TEST(BuildModelRows, UnknownGeoidListsOffenders)
{
  auto f = load_fixture();
  f.crimes.records[0].geoid = "Q";
  f.crimes.records[5].geoid = "P";
  const WeatherTable weather(f.weather.records);
  try {
    build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather);
    FAIL();
  } catch (const UnknownGeoID& e) {
    EXPECT_EQ(e.offenders(), (std::vector<std::string>{"P", "Q"}));
  }
}

TEST(BuildModelRows, WeatherGapAtRangeEnd)
{
  auto f = load_fixture();
  f.crimes.records[0].occurred_at.date = std::chrono::year_month_day{std::chrono::year(2016), std::chrono::January, std::chrono::day(1)};
  const WeatherTable weather(f.weather.records);
  EXPECT_THROW(build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather), WeatherGap);
}

TEST(Standardizer, LeavesIndicatorsAlone)
{
  const auto f = load_fixture();
  const WeatherTable weather(f.weather.records);
  const auto result = build_model_rows(f.crimes.records, f.demo.units.records, f.demo.ethnicity_names, weather);
  const auto s = Standardizer::fit(result.rows, result.layout);
  double mean_density = 0;
  for (const auto& row : result.rows) {
    const auto z = s.apply(row.features);
    EXPECT_EQ(z[0], 1.0);
    EXPECT_EQ(z[7], 1.0);  // afternoon dummy
    mean_density += z[1];
  }
  EXPECT_NEAR(mean_density, 0.0, 1e-12);
  const auto back = Standardizer::from_json(nlohmann::ordered_json::parse(s.to_json().dump()));
  EXPECT_EQ(back.apply(result.rows[0].features), s.apply(result.rows[0].features));
}
