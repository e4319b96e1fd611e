#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gwr/experiment.hpp"
#include "gwr/gwr.hpp"
#include "gwr/ingest.hpp"
#include "city_fixture.hpp"
#include "oracles.hpp"

using gwr::GeoPoint;
using gwr::KernelSpec;
using gwr::SplitSpec;
using gwr::Surface;
using gwr::SyntheticSpec;

namespace {

struct Item
{
  std::string id;
  int year;
};

std::vector<Item> items(int n, int years = 1)
{
  std::vector<Item> out;
  for (int y = 0; y < years; ++y)
    for (int i = 0; i < n; ++i)
      out.push_back({"row" + std::to_string(i), 2011 + y});
  return out;
}

gwr::SplitResult<Item> split_items(const std::vector<Item>& v, SplitSpec spec)
{
  return gwr::split<Item>(v, spec, [](const Item& i) { return i.id + "|" + std::to_string(i.year); },
                          [](const Item& i) { return i.year; });
}

std::set<std::string> ids(const std::vector<Item>& v)
{
  std::set<std::string> s;
  for (const auto& i : v)
    s.insert(i.id + "|" + std::to_string(i.year));
  return s;
}

} // namespace

TEST(Split, TenRowsGiveTwoTestRows)
{
  const auto parts = split_items(items(10), {0.2, 3});
  EXPECT_EQ(parts.test.size(), 2u);
  EXPECT_EQ(parts.train.size(), 8u);
}

TEST(Split, StratifiedByYear)
{
  const auto parts = split_items(items(10, 3), {0.2, 5});
  std::map<int, int> per_year;
  for (const auto& i : parts.test)
    ++per_year[i.year];
  EXPECT_EQ(per_year.size(), 3u);
  for (const auto& [y, n] : per_year)
    EXPECT_EQ(n, 2) << y;
}

TEST(Split, PartitionIsDisjointAndComplete)
{
  const auto v = items(37, 2);
  const auto parts = split_items(v, {0.3, 11});
  const auto tr = ids(parts.train), te = ids(parts.test);
  EXPECT_EQ(tr.size() + te.size(), v.size());
  for (const auto& id : te)
    EXPECT_FALSE(tr.count(id));
}

TEST(Split, SameSeedSameSplitDifferentSeedDifferentSplit)
{
  const auto v = items(100);
  EXPECT_EQ(ids(split_items(v, {0.2, 42}).test), ids(split_items(v, {0.2, 42}).test));
  EXPECT_NE(ids(split_items(v, {0.2, 42}).test), ids(split_items(v, {0.2, 43}).test));
}

TEST(Split, IndependentOfInputOrder)
{
  auto v = items(50);
  const auto a = ids(split_items(v, {0.2, 9}).test);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(a, ids(split_items(v, {0.2, 9}).test));
}

TEST(Split, KeepsBothSidesNonEmpty)
{
  EXPECT_EQ(split_items(items(2), {0.01, 1}).test.size(), 1u);
  EXPECT_EQ(split_items(items(2), {0.99, 1}).train.size(), 1u);
  EXPECT_EQ(split_items(items(1), {0.5, 1}).test.size(), 0u);
}

TEST(Split, RejectsBadFraction)
{
  EXPECT_THROW(split_items(items(5), {0.0, 1}), gwr::InvalidArgument);
  EXPECT_THROW(split_items(items(5), {1.0, 1}), gwr::InvalidArgument);
}

TEST(Synthetic, DeterministicForSeed)
{
  SyntheticSpec spec;
  spec.n_locations = 50;
  spec.noise_sigma = 0.1;
  const auto a = gwr::generate_synthetic(spec);
  const auto b = gwr::generate_synthetic(spec);
  for (std::size_t i = 0; i < a.data.n(); ++i) {
    EXPECT_EQ(a.data[i].response, b.data[i].response);
    EXPECT_EQ(a.data[i].location, b.data[i].location);
    EXPECT_EQ(a.data[i].label, b.data[i].label);
  }
  spec.seed = 2;
  EXPECT_NE(gwr::generate_synthetic(spec).data[0].response, a.data[0].response);
}

TEST(Synthetic, NoiselessResponsesMatchSurfaces)
{
  SyntheticSpec spec;
  spec.n_locations = 30;
  const auto s = gwr::generate_synthetic(spec);
  for (std::size_t i = 0; i < s.data.n(); ++i) {
    const auto& o = s.data[i];
    EXPECT_TRUE(spec.bbox.contains(o.location));
    const double u = (o.location.lon() - spec.bbox.min_lon) / (spec.bbox.max_lon - spec.bbox.min_lon);
    const double v = (o.location.lat() - spec.bbox.min_lat) / (spec.bbox.max_lat - spec.bbox.min_lat);
    const double expected = (1.0 + u) * o.features[0] + std::sin(std::numbers::pi * v) * o.features[1];
    EXPECT_NEAR(o.response, expected, 1e-14);
  }
}

TEST(Synthetic, ConstantTruthIsRecovered)
{
  SyntheticSpec spec;
  spec.n_locations = 60;
  spec.surfaces = {Surface::constant(0.3), Surface::constant(-1.2), Surface::constant(0.7)};
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(3.0));
  for (const auto& l : model.locals()) {
    EXPECT_NEAR(l.beta[0], 0.3, 1e-8);
    EXPECT_NEAR(l.beta[1], -1.2, 1e-8);
    EXPECT_NEAR(l.beta[2], 0.7, 1e-8);
  }
}

TEST(Holdout, NoiselessConstantTruthHasUnitRSquared)
{
  SyntheticSpec spec;
  spec.n_locations = 100;
  spec.surfaces = {Surface::constant(0.3), Surface::constant(-1.2)};
  const auto s = gwr::generate_synthetic(spec);
  gwr::BandwidthChoice choice;
  choice.fixed_km = 5.0;
  const auto r = gwr::evaluate_holdout(s.data, {0.2, 1}, choice);
  EXPECT_EQ(r.n_test, 20u);
  EXPECT_EQ(r.n_train, 80u);
  ASSERT_TRUE(r.r_squared);
  EXPECT_NEAR(*r.r_squared, 1.0, 1e-10);
}

TEST(Holdout, GeoidAveragePredictionMatchesDirectAverage)
{
  std::mt19937_64 rng(3);
  const auto data = oracle::random_dataset(rng, 20, 2);
  const auto model = gwr::fit(data, KernelSpec(5.0));
  const auto& l = model.locals()[4];
  const std::vector<gwr::HoldoutQuery> q{{l.label, l.point, {1.0, 0.5}}, {"nowhere", l.point, {1.0, 0.5}}};
  const auto preds = gwr::predict_holdout(model, data, q);
  const auto fits = model.locals_with_label(l.label);
  double b0 = 0, b1 = 0;
  for (const auto* f : fits) {
    b0 += f->beta[0];
    b1 += f->beta[1];
  }
  b0 /= static_cast<double>(fits.size());
  b1 /= static_cast<double>(fits.size());
  EXPECT_NEAR(preds[0].value, b0 + 0.5 * b1, 1e-14);
  EXPECT_EQ(preds[0].mode, gwr::PredictionMode::geoid_average);
  EXPECT_EQ(preds[1].mode, gwr::PredictionMode::refit_at_point);
  EXPECT_EQ(gwr::count_refits(preds), 1u);
}

namespace {

// Twenty GeoUnits, two years, four buckets per year with varying
// temperature; the burglary share is an exact linear function of the raw
// features.
struct RowFixture
{
  gwr::FeatureLayout layout{{"eth_a", "eth_b"}};
  std::vector<gwr::ModelRow> rows;
  std::vector<double> coef{0.2, 1e-5, -4e-7, 0.1, 0.002, 0.03, 0.05, -0.02, 0.001};

  explicit RowFixture(int years = 2, int units = 20)
  {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int g = 0; g < units; ++g) {
      gwr::GeoUnit unit;
      unit.geoid = "G" + std::to_string(g);
      unit.centroid = GeoPoint(-77.7 + 0.2 * u(rng), 43.1 + 0.15 * u(rng));
      unit.population_density = 1000 + 4000 * u(rng);
      unit.property_rate = 50000 + 200000 * u(rng);
      const double a = 0.3 + 0.4 * u(rng);
      unit.ethnicity_shares = {a, 1 - a};
      unit.median_age = 25 + 20 * u(rng);
      for (int y = 0; y < years; ++y)
        for (int b = 0; b < 4; ++b) {
          gwr::ModelRow r;
          r.geoid = unit.geoid;
          r.location = unit.centroid;
          r.year = 2011 + y;
          r.time_bucket = static_cast<gwr::TimeBucket>(b);
          r.features = layout.build(unit, 6 * b, 30 + 50 * u(rng));
          r.support = 10;
          const double share = gwr::dot(r.features, coef);
          for (auto& s : r.responses)
            s = (1 - share) / 5;
          r.responses[gwr::index_of(gwr::CrimeType::Burglary)] = share;
          rows.push_back(std::move(r));
        }
    }
  }
};

} // namespace

TEST(YearlyEvaluation, NoiselessLinearSharesArePredictedExactly)
{
  const RowFixture fx;
  gwr::BandwidthChoice choice;
  choice.fixed_km = 200.0;
  const auto report = gwr::run_yearly_evaluation(fx.rows, fx.layout, gwr::CrimeType::Burglary, choice, {0.2, 4});
  ASSERT_EQ(report.years.size(), 2u);
  for (const auto& y : report.years) {
    EXPECT_EQ(y.n_train + y.n_test, 80u);
    EXPECT_EQ(y.n_test, 16u);
    EXPECT_EQ(y.scatter.size(), y.n_test);
    ASSERT_TRUE(y.r_squared);
    EXPECT_GE(*y.r_squared, 0.999);
  }
}

TEST(YearlyEvaluation, ScatterCsvHasOneLinePerTestRow)
{
  const RowFixture fx;
  gwr::BandwidthChoice choice;
  choice.fixed_km = 200.0;
  const auto report = gwr::run_yearly_evaluation(fx.rows, fx.layout, gwr::CrimeType::Burglary, choice, {0.2, 4});
  std::ostringstream out;
  gwr::write_scatter_csv(out, report);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "geoid,year,empirical,predicted");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 32);
  const auto metrics = gwr::metrics_json(report);
  EXPECT_EQ(metrics["crime_type"], "burglary");
  EXPECT_EQ(metrics["years"].size(), 2u);
}

TEST(YearlyEvaluation, SharedBandwidthUsesOneValue)
{
  const RowFixture fx;
  gwr::BandwidthChoice choice;
  choice.grid_km = {20.0, 200.0};
  const auto report =
      gwr::run_yearly_evaluation(fx.rows, fx.layout, gwr::CrimeType::Burglary, choice, {0.2, 4}, true);
  EXPECT_EQ(report.years[0].bandwidth_km, report.years[1].bandwidth_km);
}

TEST(YearlyEvaluation, TooFewTrainingRowsThrows)
{
  const RowFixture fx(1, 2);
  gwr::BandwidthChoice choice;
  choice.fixed_km = 200.0;
  EXPECT_THROW(gwr::run_yearly_evaluation(fx.rows, fx.layout, gwr::CrimeType::Burglary, choice, {0.2, 4}),
               gwr::YearTooSmall);
}

namespace {

gwr::FeatureProvider fixed_features(std::vector<double> x)
{
  return [x](const GeoPoint&) { return x; };
}

} // namespace

TEST(Heatmap, SingleCellIsPredictionAtBboxCenter)
{
  SyntheticSpec spec;
  spec.n_locations = 80;
  spec.surfaces = {Surface::linear_u(0.2, 0.3), Surface::sinusoidal_v(0.0, 0.3)};
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(3.0));
  const auto grid = gwr::heatmap(model, s.data, spec.bbox, 1, fixed_features({1.0, 0.5}));
  ASSERT_EQ(grid.values.size(), 1u);
  const GeoPoint c((spec.bbox.min_lon + spec.bbox.max_lon) / 2, (spec.bbox.min_lat + spec.bbox.max_lat) / 2);
  const std::vector<double> x{1.0, 0.5};
  EXPECT_DOUBLE_EQ(*grid.at(0, 0), gwr::predict_refit(model, s.data, c, x));
}

TEST(Heatmap, ConstantTruthGivesFlatGrid)
{
  SyntheticSpec spec;
  spec.n_locations = 80;
  spec.surfaces = {Surface::constant(0.4), Surface::constant(0.1)};
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(3.0));
  const auto grid = gwr::heatmap(model, s.data, spec.bbox, 12, fixed_features({1.0, 0.5}));
  ASSERT_EQ(grid.values.size(), 144u);
  double lo = 1, hi = 0;
  for (const auto& v : grid.values) {
    ASSERT_TRUE(v);
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
  }
  EXPECT_LE(hi - lo, 1e-6);
  EXPECT_NEAR(lo, 0.45, 1e-6);
}

TEST(Heatmap, AdjacentCellsRespectSurfaceLipschitzBound)
{
  SyntheticSpec spec;
  spec.n_locations = 400;
  spec.surfaces = {Surface::linear_u(0.2, 0.3), Surface::sinusoidal_v(0.0, 0.3)};
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(5.0));
  const std::size_t res = 10;
  const std::vector<double> x{1.0, 0.5};
  const auto grid = gwr::heatmap(model, s.data, spec.bbox, res, fixed_features(x));
  // A one-cell step moves u or v by 1/res. The true surface changes by at
  // most |x0| b0 / res along u and |x1| pi b1 / res along v. With the
  // bandwidth well above the point spacing the fitted surface is flatter.
  const double step_u = std::abs(x[0]) * 0.3 / res;
  const double step_v = std::abs(x[1]) * std::numbers::pi * 0.3 / res;
  for (std::size_t r = 0; r < res; ++r)
    for (std::size_t c = 0; c < res; ++c) {
      if (c + 1 < res) {
        EXPECT_LE(std::abs(*grid.at(r, c + 1) - *grid.at(r, c)), step_u) << r << "," << c;
      }
      if (r + 1 < res) {
        EXPECT_LE(std::abs(*grid.at(r + 1, c) - *grid.at(r, c)), step_v) << r << "," << c;
      }
    }
}

TEST(Heatmap, ValuesAreClampedAndDegenerateCellsEmpty)
{
  std::vector<gwr::Observation> rows;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int i = 0; i < 30; ++i)
    rows.push_back({GeoPoint(-77.60 + 0.001 * (i % 5), 43.15 + 0.001 * (i / 5)), {1.0, z(rng)}, 3.0, "a"});
  const gwr::GWRDataset data(rows);
  const auto model = gwr::fit(data, KernelSpec(1.0));
  const gwr::BoundingBox far{-77.70, 43.10, -77.50, 43.25};
  const auto grid = gwr::heatmap(model, data, far, 8, fixed_features({1.0, 0.0}));
  std::size_t empty = 0, ones = 0;
  for (const auto& v : grid.values) {
    if (!v)
      ++empty;
    else {
      EXPECT_EQ(*v, 1.0);
      ++ones;
    }
  }
  EXPECT_GT(empty, 0u);
  EXPECT_GT(ones, 0u);
}

TEST(Heatmap, GeoJsonRoundTripsExactly)
{
  SyntheticSpec spec;
  spec.n_locations = 60;
  spec.surfaces = {Surface::linear_u(0.2, 0.3), Surface::sinusoidal_v(0.0, 0.3)};
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(2.5));
  auto grid = gwr::heatmap(model, s.data, spec.bbox, 5, fixed_features({1.0, 0.3}), "burglary", 2014);
  grid.values[3] = std::nullopt;
  std::stringstream io;
  gwr::export_geojson(grid, io);
  const auto back = gwr::parse_geojson(io);
  EXPECT_EQ(back.resolution, grid.resolution);
  EXPECT_EQ(back.crime_type, "burglary");
  EXPECT_EQ(back.year, 2014);
  EXPECT_EQ(back.bbox.min_lon, grid.bbox.min_lon);
  EXPECT_EQ(back.bbox.max_lat, grid.bbox.max_lat);
  ASSERT_EQ(back.values.size(), grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    EXPECT_EQ(back.values[i], grid.values[i]) << i;
}

TEST(Heatmap, RejectsZeroResolution)
{
  SyntheticSpec spec;
  spec.n_locations = 20;
  const auto s = gwr::generate_synthetic(spec);
  const auto model = gwr::fit(s.data, KernelSpec(5.0));
  EXPECT_THROW(gwr::heatmap(model, s.data, spec.bbox, 0, fixed_features({1.0, 0.0})), gwr::InvalidArgument);
}

using fixture::small_bundle;

TEST(SyntheticCity, DeterministicAndConsistent)
{
  gwr::CitySpec spec;
  spec.n_geoids = 9;
  spec.first_year = 2015;
  spec.last_year = 2015;
  const auto a = gwr::generate_city(spec);
  const auto b = gwr::generate_city(spec);
  std::ostringstream ca, cb;
  gwr::write_crimes_csv(ca, a.incidents);
  gwr::write_crimes_csv(cb, b.incidents);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(a.units.size(), 9u);
  EXPECT_GT(a.incidents.size(), 200u);
  for (const auto& u : a.units) {
    double sum = 0;
    for (double s : u.ethnicity_shares)
      sum += s;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // Weather covers the first and last day so every incident date is in range.
  EXPECT_EQ(gwr::format_date(a.weather.front().date), "2015-01-01");
  EXPECT_EQ(gwr::format_date(a.weather.back().date), "2015-12-31");
  EXPECT_LT(a.weather.size(), 365u);
}

TEST(SyntheticCity, CsvOutputParsesBack)
{
  gwr::CitySpec spec;
  spec.n_geoids = 9;
  spec.first_year = 2015;
  spec.last_year = 2015;
  const auto city = gwr::generate_city(spec);
  std::stringstream crimes, demo, weather;
  gwr::write_crimes_csv(crimes, city.incidents);
  gwr::write_demographics_csv(demo, city);
  gwr::write_weather_csv(weather, city.weather);
  const gwr::ColumnMap cols;
  EXPECT_EQ(gwr::parse_crimes(crimes, cols.crimes).records.size(), city.incidents.size());
  const auto d = gwr::parse_demographics(demo, cols.demographics);
  EXPECT_EQ(d.units.records.size(), 9u);
  EXPECT_EQ(d.ethnicity_names, city.ethnicity_names);
  EXPECT_EQ(gwr::parse_weather(weather, cols.weather).records.size(), city.weather.size());
}

TEST(Bundle, JsonRoundTripPreservesPredictionsAndVersion)
{
  const auto b = small_bundle();
  EXPECT_EQ(b.model_version.size(), 16u);
  EXPECT_EQ(b.regression_points(), 16u);
  const auto back = gwr::ModelBundle::from_json(nlohmann::ordered_json::parse(b.to_json().dump()));
  EXPECT_EQ(back.model_version, b.model_version);
  EXPECT_EQ(back.compute_version(), b.model_version);
  EXPECT_EQ(back.to_json().dump(), b.to_json().dump());
  const auto& unit = b.geounits.front();
  const auto x = b.standardizer.apply(b.layout.build(unit, 13, 70.0));
  for (gwr::CrimeType t : gwr::kAllCrimeTypes) {
    const GeoPoint q(unit.centroid.lon() + 0.01, unit.centroid.lat());
    EXPECT_EQ(gwr::predict_refit(back.model(t), back.dataset(t), q, x),
              gwr::predict_refit(b.model(t), b.dataset(t), q, x));
  }
}
