#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/errors.hpp"
#include "../ingest/crime_type.hpp"
#include "../ingest/csv.hpp"
#include "../ingest/model_rows.hpp"
#include "../ingest/records.hpp"
#include "../ingest/weather_table.hpp"
#include "correlation.hpp"

namespace gwr::stats {

struct Histogram
{
  std::vector<std::string> labels;
  /// Numeric edges (bins + 1) for value histograms; empty for categorical bins.
  std::vector<double> bin_edges;
  std::vector<long> counts;
  std::vector<double> percentages;
  std::optional<CrimeType> crime_filter;

  long total() const
  {
    long t = 0;
    for (long c : counts)
      t += c;
    return t;
  }
};

namespace detail {

inline bool keep(const CrimeIncident& inc, std::optional<CrimeType> filter)
{
  return !filter || inc.crime_type == *filter;
}

inline void finish(Histogram& h)
{
  const long total = h.total();
  if (total == 0)
    throw EmptyAfterFilter("no incidents left after filtering");
  h.percentages.clear();
  for (long c : h.counts)
    h.percentages.push_back(100.0 * static_cast<double>(c) / static_cast<double>(total));
}

inline std::string two_digits(int v)
{
  return v < 10 ? "0" + std::to_string(v) : std::to_string(v);
}

} // namespace detail

inline constexpr std::array<const char*, 12> kMonthNames{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                         "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

/// 24 bins; bin k counts incidents whose hour is k.
inline Histogram hour_histogram(std::span<const CrimeIncident> incidents,
                                std::optional<CrimeType> filter = std::nullopt)
{
  Histogram h;
  h.crime_filter = filter;
  h.counts.assign(24, 0);
  for (int k = 0; k < 24; ++k)
    h.labels.push_back(detail::two_digits(k) + ":00");
  for (const auto& inc : incidents)
    if (detail::keep(inc, filter))
      ++h.counts[static_cast<std::size_t>(inc.occurred_at.hour)];
  detail::finish(h);
  return h;
}

inline Histogram month_histogram(std::span<const CrimeIncident> incidents,
                                 std::optional<CrimeType> filter = std::nullopt)
{
  Histogram h;
  h.crime_filter = filter;
  h.counts.assign(12, 0);
  h.labels.assign(kMonthNames.begin(), kMonthNames.end());
  for (const auto& inc : incidents)
    if (detail::keep(inc, filter))
      ++h.counts[static_cast<std::size_t>(month_of(inc.occurred_at.date) - 1)];
  detail::finish(h);
  return h;
}

/// Bins of `bin_width_f` degrees aligned to multiples of the width, covering
/// the range of incident-day temperatures.
inline Histogram temperature_histogram(std::span<const CrimeIncident> incidents,
                                       const WeatherTable& weather,
                                       std::optional<CrimeType> filter = std::nullopt,
                                       double bin_width_f = 5.0)
{
  if (!(bin_width_f > 0.0))
    throw InvalidArgument("temperature bin width must be positive");
  std::vector<double> temps;
  for (const auto& inc : incidents)
    if (detail::keep(inc, filter))
      temps.push_back(weather.temperature_on(inc.occurred_at.date).avg_temp_f);
  if (temps.empty())
    throw EmptyAfterFilter("no incidents left after filtering");
  double lo = temps.front(), hi = temps.front();
  for (double t : temps) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  const double start = std::floor(lo / bin_width_f) * bin_width_f;
  const auto bins = static_cast<std::size_t>(std::floor((hi - start) / bin_width_f)) + 1;

  Histogram h;
  h.crime_filter = filter;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b)
    h.bin_edges.push_back(start + static_cast<double>(b) * bin_width_f);
  for (std::size_t b = 0; b < bins; ++b)
    h.labels.push_back(csv::format_double(h.bin_edges[b]) + "-" + csv::format_double(h.bin_edges[b + 1]));
  for (double t : temps) {
    auto b = static_cast<std::size_t>(std::floor((t - start) / bin_width_f));
    if (b >= bins)
      b = bins - 1;
    ++h.counts[b];
  }
  detail::finish(h);
  return h;
}

struct MonthProfileEntry
{
  int month = 0;
  double crime_percentage = 0.0;
  /// Mean recorded temperature over the weather table's days in this month.
  std::optional<double> mean_temp_f;
};

inline std::vector<MonthProfileEntry> month_temperature_profile(std::span<const CrimeIncident> incidents,
                                                                const WeatherTable& weather,
                                                                std::optional<CrimeType> filter = std::nullopt)
{
  const auto hist = month_histogram(incidents, filter);
  const auto means = weather.monthly_means();
  std::vector<MonthProfileEntry> out;
  for (int m = 0; m < 12; ++m)
    out.push_back({m + 1, hist.percentages[static_cast<std::size_t>(m)], means[static_cast<std::size_t>(m)]});
  return out;
}

/// Strict local maxima among occupied bins; a plateau reports its first bin.
inline std::vector<std::size_t> find_modes(const Histogram& h)
{
  std::vector<std::size_t> modes;
  const auto& c = h.counts;
  std::size_t i = 0;
  while (i < c.size()) {
    std::size_t j = i;
    while (j + 1 < c.size() && c[j + 1] == c[i])
      ++j;
    const bool left_lower = i == 0 || c[i - 1] < c[i];
    const bool right_lower = j + 1 == c.size() || c[j + 1] < c[i];
    if (c[i] > 0 && left_lower && right_lower)
      modes.push_back(i);
    i = j + 1;
  }
  return modes;
}

inline constexpr std::array<int, 3> kShiftChangeHours{7, 15, 23};

/// Indicator with 1 at the police shift-change hours.
inline std::array<double, 24> shift_change_indicator()
{
  std::array<double, 24> v{};
  for (int h : kShiftChangeHours)
    v[static_cast<std::size_t>(h)] = 1.0;
  return v;
}

/// Pearson r between hourly crime percentages and the shift-change indicator.
inline double shift_change_correlation(const Histogram& hour_hist)
{
  if (hour_hist.percentages.size() != 24)
    throw InvalidArgument("shift_change_correlation needs a 24-bin hour histogram");
  const auto indicator = shift_change_indicator();
  return pearson(hour_hist.percentages, indicator);
}

struct FeatureResponseCorrelation
{
  double r = 0.0;
  std::vector<std::pair<double, double>> pairs;
};

inline FeatureResponseCorrelation feature_response_correlation(std::span<const ModelRow> rows,
                                                               const FeatureLayout& layout,
                                                               const std::string& feature,
                                                               CrimeType type)
{
  if (rows.size() < 2)
    throw InvalidArgument("feature_response_correlation needs at least two rows");
  const std::size_t k = layout.index_of(feature);
  FeatureResponseCorrelation out;
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(r.features[k]);
    y.push_back(r.response(type));
    out.pairs.emplace_back(x.back(), y.back());
  }
  out.r = pearson(x, y);
  return out;
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h)
{
  out << "bin_label,count,percentage\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << csv::escape(h.labels[i]) << ',' << h.counts[i] << ',' << csv::format_double(h.percentages[i]) << '\n';
}

inline void write_month_profile_csv(std::ostream& out, std::span<const MonthProfileEntry> profile)
{
  out << "month,crime_percentage,mean_temp_f\n";
  for (const auto& e : profile) {
    out << kMonthNames[static_cast<std::size_t>(e.month - 1)] << ',' << csv::format_double(e.crime_percentage) << ',';
    if (e.mean_temp_f)
      out << csv::format_double(*e.mean_temp_f);
    out << '\n';
  }
}

inline void write_pairs_csv(std::ostream& out,
                            const std::string& feature,
                            CrimeType type,
                            const FeatureResponseCorrelation& c)
{
  out << csv::escape(feature) << ',' << key_of(type) << '\n';
  for (const auto& [x, y] : c.pairs)
    out << csv::format_double(x) << ',' << csv::format_double(y) << '\n';
}

} // namespace gwr::stats
