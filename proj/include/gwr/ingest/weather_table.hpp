#pragma once

#include <array>
#include <chrono>
#include <iterator>
#include <map>
#include <optional>
#include <span>

#include "../core/errors.hpp"
#include "records.hpp"

namespace gwr {

struct DailyTemperature
{
  double avg_temp_f = 0.0;
  bool interpolated = false;
};

/// Date-indexed weather lookup. Dates missing from the table are linearly
/// interpolated between the nearest recorded neighbours.
class WeatherTable
{
public:
  WeatherTable() = default;

  explicit WeatherTable(std::span<const WeatherDay> days)
  {
    for (const auto& d : days)
      temps_[std::chrono::sys_days(d.date)] = d.avg_temp_f;
  }

  bool empty() const { return temps_.empty(); }

  DailyTemperature temperature_on(const Date& date) const
  {
    const std::chrono::sys_days day(date);
    if (temps_.empty())
      throw WeatherGap("weather table is empty");
    auto hi = temps_.lower_bound(day);
    if (hi != temps_.end() && hi->first == day)
      return {hi->second, false};
    if (hi == temps_.begin() || hi == temps_.end())
      throw WeatherGap("no weather on either side of " + format_date(date) + " to interpolate from");
    auto lo = std::prev(hi);
    const double span = static_cast<double>((hi->first - lo->first).count());
    const double t = static_cast<double>((day - lo->first).count()) / span;
    return {lo->second + t * (hi->second - lo->second), true};
  }

  /// Mean recorded temperature per calendar month (index 0 = January).
  std::array<std::optional<double>, 12> monthly_means() const
  {
    std::array<double, 12> sum{};
    std::array<int, 12> count{};
    for (const auto& [day, temp] : temps_) {
      const auto m = month_of(Date(day)) - 1;
      sum[m] += temp;
      ++count[m];
    }
    std::array<std::optional<double>, 12> out;
    for (int m = 0; m < 12; ++m)
      if (count[m] > 0)
        out[m] = sum[m] / count[m];
    return out;
  }

  std::optional<double> overall_mean() const
  {
    if (temps_.empty())
      return std::nullopt;
    double sum = 0.0;
    for (const auto& [day, temp] : temps_)
      sum += temp;
    return sum / static_cast<double>(temps_.size());
  }

  std::optional<double> yearly_mean(int year) const
  {
    double sum = 0.0;
    int count = 0;
    for (const auto& [day, temp] : temps_)
      if (year_of(Date(day)) == year) {
        sum += temp;
        ++count;
      }
    if (count == 0)
      return std::nullopt;
    return sum / count;
  }

private:
  std::map<std::chrono::sys_days, double> temps_;
};

} // namespace gwr
