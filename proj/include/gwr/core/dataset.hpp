#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geo.hpp"

namespace gwr {

/// One regression observation. `label` is the area identifier (GeoID) the
/// row belongs to; it may be empty for unlabeled data.
struct Observation
{
  GeoPoint location;
  std::vector<double> features;
  double response = 0.0;
  std::string label;
};

/// Validated regression data. Feature 0 is the intercept column (always 1).
class GWRDataset
{
public:
  GWRDataset() = default;

  explicit GWRDataset(std::vector<Observation> rows)
    : rows_(std::move(rows))
  {
    validate();
  }

  std::size_t n() const { return rows_.size(); }
  std::size_t p() const { return rows_.empty() ? 0 : rows_.front().features.size(); }

  const std::vector<Observation>& rows() const { return rows_; }
  const Observation& operator[](std::size_t i) const { return rows_[i]; }

  std::vector<double> responses() const
  {
    std::vector<double> y;
    y.reserve(rows_.size());
    for (const auto& r : rows_)
      y.push_back(r.response);
    return y;
  }

  /// Distinct locations in first-appearance order, with the label of the
  /// first row seen at each location.
  std::vector<std::pair<GeoPoint, std::string>> distinct_locations() const
  {
    std::vector<std::pair<GeoPoint, std::string>> out;
    std::map<GeoPoint, std::size_t> seen;
    for (const auto& r : rows_) {
      if (seen.emplace(r.location, out.size()).second)
        out.emplace_back(r.location, r.label);
    }
    return out;
  }

  GWRDataset without_row(std::size_t index) const
  {
    std::vector<Observation> rows;
    rows.reserve(rows_.size() - 1);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (i != index)
        rows.push_back(rows_[i]);
    return GWRDataset(std::move(rows));
  }

private:
  void validate() const
  {
    if (rows_.empty())
      throw InvalidArgument("dataset has no rows");
    const std::size_t p = rows_.front().features.size();
    if (p < 1)
      throw InvalidArgument("dataset needs at least the intercept feature");
    if (rows_.size() < p)
      throw InvalidArgument("dataset has fewer rows than features (n < p)");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      if (r.features.size() != p)
        throw InvalidArgument("row " + std::to_string(i) + " has a feature vector of different length");
      if (r.features[0] != 1.0)
        throw InvalidArgument("row " + std::to_string(i) + " intercept feature is not 1");
      for (double x : r.features)
        if (!std::isfinite(x))
          throw InvalidArgument("row " + std::to_string(i) + " has a non-finite feature");
      if (!std::isfinite(r.response))
        throw InvalidArgument("row " + std::to_string(i) + " has a non-finite response");
    }
  }

  std::vector<Observation> rows_;
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace gwr
