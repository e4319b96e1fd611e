#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/bandwidth.hpp"
#include "../core/dataset.hpp"
#include "../core/metrics.hpp"
#include "../core/model.hpp"
#include "../ingest/csv.hpp"
#include "../ingest/model_rows.hpp"
#include "../ingest/standardize.hpp"
#include "split.hpp"

namespace gwr {

/// Fixed bandwidth, explicit candidate grid, or (both empty) the default
/// log-spaced grid derived from the training locations.
struct BandwidthChoice
{
  std::optional<double> fixed_km;
  std::vector<double> grid_km;

  double resolve(const GWRDataset& train) const
  {
    if (fixed_km)
      return *fixed_km;
    const auto grid = grid_km.empty() ? default_bandwidth_grid(train) : grid_km;
    return select_bandwidth(train, grid).best_bandwidth_km;
  }
};

/// What the predictor is allowed to see of a held-out row.
struct HoldoutQuery
{
  std::string label;
  GeoPoint location;
  std::vector<double> features;
};

struct HoldoutPrediction
{
  double value = 0.0;
  PredictionMode mode = PredictionMode::geoid_average;
};

/// GeoID-average prediction for every query whose label has training fits;
/// refit at the query point otherwise.
inline std::vector<HoldoutPrediction> predict_holdout(const FittedGWR& model,
                                                      const GWRDataset& train,
                                                      std::span<const HoldoutQuery> queries)
{
  std::vector<HoldoutPrediction> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const auto fits = model.locals_with_label(q.label);
    if (!fits.empty())
      out.push_back({predict_geoid_average(fits, q.features), PredictionMode::geoid_average});
    else
      out.push_back({predict_refit(model, train, q.location, q.features), PredictionMode::refit_at_point});
  }
  return out;
}

inline std::size_t count_refits(std::span<const HoldoutPrediction> preds)
{
  std::size_t n = 0;
  for (const auto& p : preds)
    n += p.mode == PredictionMode::refit_at_point;
  return n;
}

struct HoldoutResult
{
  double bandwidth_km = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_refit_fallback = 0;
  std::optional<double> r_squared;
  std::vector<std::string> labels;
  std::vector<double> empirical;
  std::vector<double> predicted;
};

namespace detail {

inline std::string point_identity(const Observation& o, std::size_t index)
{
  return std::to_string(index) + "@" + csv::format_double(o.location.lon()) + "," +
         csv::format_double(o.location.lat());
}

inline std::optional<double> safe_r_squared(std::span<const double> a, std::span<const double> p)
{
  try {
    return r_squared(a, p);
  } catch (const ZeroVariance&) {
    return std::nullopt;
  }
}

} // namespace detail

/// Holdout evaluation of a plain dataset: split, fit on the training part,
/// predict the test part with features only, then score.
inline HoldoutResult evaluate_holdout(const GWRDataset& data, const SplitSpec& spec, const BandwidthChoice& choice)
{
  std::vector<std::pair<std::size_t, Observation>> indexed;
  for (std::size_t i = 0; i < data.n(); ++i)
    indexed.emplace_back(i, data[i]);
  using Item = std::pair<std::size_t, Observation>;
  const auto parts = split<Item>(
    indexed, spec, [](const Item& it) { return detail::point_identity(it.second, it.first); },
    [](const Item&) { return 0; });

  std::vector<Observation> train_rows;
  for (const auto& it : parts.train)
    train_rows.push_back(it.second);
  const GWRDataset train(std::move(train_rows));

  HoldoutResult out;
  out.bandwidth_km = choice.resolve(train);
  const auto model = fit(train, KernelSpec(out.bandwidth_km));

  std::vector<HoldoutQuery> queries;
  for (const auto& it : parts.test)
    queries.push_back({it.second.label, it.second.location, it.second.features});
  const auto preds = predict_holdout(model, train, queries);

  out.n_train = train.n();
  out.n_test = queries.size();
  out.n_refit_fallback = count_refits(preds);
  for (std::size_t i = 0; i < parts.test.size(); ++i) {
    out.labels.push_back(parts.test[i].second.label);
    out.empirical.push_back(parts.test[i].second.response);
    out.predicted.push_back(preds[i].value);
  }
  out.r_squared = detail::safe_r_squared(out.empirical, out.predicted);
  return out;
}

struct ScatterPoint
{
  std::string geoid;
  int year = 0;
  double empirical = 0.0;
  double predicted = 0.0;
};

struct YearEvaluation
{
  int year = 0;
  double bandwidth_km = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_refit_fallback = 0;
  std::optional<double> r_squared;
  std::vector<ScatterPoint> scatter;
};

struct EvaluationReport
{
  CrimeType crime_type = CrimeType::Larceny;
  SplitSpec split;
  std::vector<YearEvaluation> years;
};

inline std::string row_identity(const ModelRow& r)
{
  return r.geoid + "|" + std::to_string(r.year) + "|" + std::to_string(static_cast<int>(r.time_bucket));
}

inline SplitResult<ModelRow> split_model_rows(std::span<const ModelRow> rows, const SplitSpec& spec)
{
  return split<ModelRow>(rows, spec, row_identity, [](const ModelRow& r) { return r.year; });
}

/// Per-year holdout protocol for one crime type: for each year, fit on the
/// year's training rows and predict its test rows by GeoID averaging.
/// With `shared_bandwidth`, one bandwidth is selected on all training rows.
inline EvaluationReport run_yearly_evaluation(std::span<const ModelRow> rows,
                                              const FeatureLayout& layout,
                                              CrimeType type,
                                              const BandwidthChoice& choice,
                                              const SplitSpec& spec,
                                              bool shared_bandwidth = false)
{
  const auto parts = split_model_rows(rows, spec);
  std::map<int, std::vector<ModelRow>> train_by_year, test_by_year;
  for (const auto& r : parts.train)
    train_by_year[r.year].push_back(r);
  for (const auto& r : parts.test)
    test_by_year[r.year].push_back(r);

  const std::size_t p = layout.size();
  for (const auto& [year, train] : train_by_year)
    if (train.size() < 2 * p)
      throw YearTooSmall("year " + std::to_string(year) + " has " + std::to_string(train.size()) +
                         " training rows; need at least " + std::to_string(2 * p));

  std::optional<double> shared_h;
  if (shared_bandwidth) {
    const auto pooled_std = Standardizer::fit(parts.train, layout);
    shared_h = choice.resolve(to_dataset(parts.train, type, pooled_std));
  }

  EvaluationReport report{type, spec, {}};
  for (const auto& [year, train_rows] : train_by_year) {
    const auto standardizer = Standardizer::fit(train_rows, layout);
    const GWRDataset train = to_dataset(train_rows, type, standardizer);
    YearEvaluation ye;
    ye.year = year;
    ye.bandwidth_km = shared_h ? *shared_h : choice.resolve(train);
    const auto model = fit(train, KernelSpec(ye.bandwidth_km), layout.names());

    const auto& test_rows = test_by_year[year];
    std::vector<HoldoutQuery> queries;
    for (const auto& r : test_rows)
      queries.push_back({r.geoid, r.location, standardizer.apply(r.features)});
    const auto preds = predict_holdout(model, train, queries);

    ye.n_train = train_rows.size();
    ye.n_test = test_rows.size();
    ye.n_refit_fallback = count_refits(preds);
    std::vector<double> empirical, predicted;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      ye.scatter.push_back({test_rows[i].geoid, year, test_rows[i].response(type), preds[i].value});
      empirical.push_back(ye.scatter.back().empirical);
      predicted.push_back(ye.scatter.back().predicted);
    }
    if (!empirical.empty())
      ye.r_squared = detail::safe_r_squared(empirical, predicted);
    report.years.push_back(std::move(ye));
  }
  return report;
}

inline void write_scatter_csv(std::ostream& out, const EvaluationReport& report)
{
  out << "geoid,year,empirical,predicted\n";
  for (const auto& y : report.years)
    for (const auto& s : y.scatter)
      out << csv::escape(s.geoid) << ',' << s.year << ',' << csv::format_double(s.empirical) << ','
          << csv::format_double(s.predicted) << '\n';
}

inline nlohmann::ordered_json metrics_json(const EvaluationReport& report)
{
  nlohmann::ordered_json j;
  j["crime_type"] = std::string(key_of(report.crime_type));
  j["test_fraction"] = report.split.test_fraction;
  j["seed"] = report.split.seed;
  auto years = nlohmann::ordered_json::array();
  for (const auto& y : report.years) {
    nlohmann::ordered_json e;
    e["year"] = y.year;
    e["bandwidth_km"] = y.bandwidth_km;
    e["n_train"] = y.n_train;
    e["n_test"] = y.n_test;
    e["n_refit_fallback"] = y.n_refit_fallback;
    if (y.r_squared)
      e["r_squared"] = *y.r_squared;
    else
      e["r_squared"] = nullptr;
    years.push_back(std::move(e));
  }
  j["years"] = std::move(years);
  return j;
}

} // namespace gwr
