#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "../core/dataset.hpp"
#include "../core/errors.hpp"
#include "crime_type.hpp"
#include "model_rows.hpp"

namespace gwr {

/// z-score transform for the non-indicator features. Statistics come from
/// the training rows only; indicator columns pass through unchanged.
class Standardizer
{
public:
  Standardizer() = default;

  Standardizer(std::vector<double> mean, std::vector<double> scale, std::vector<bool> active)
    : mean_(std::move(mean)), scale_(std::move(scale)), active_(std::move(active))
  {
    if (mean_.size() != scale_.size() || mean_.size() != active_.size())
      throw InvalidArgument("standardizer vectors differ in length");
  }

  static Standardizer fit(std::span<const ModelRow> rows, const FeatureLayout& layout)
  {
    if (rows.empty())
      throw InvalidArgument("cannot standardize an empty row set");
    const std::size_t p = layout.size();
    std::vector<double> mean(p, 0.0), scale(p, 1.0);
    std::vector<bool> active(p, false);
    const double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < p; ++k) {
      if (layout.is_indicator(k))
        continue;
      active[k] = true;
      double m = 0.0;
      for (const auto& r : rows)
        m += r.features[k];
      m /= n;
      double v = 0.0;
      for (const auto& r : rows)
        v += (r.features[k] - m) * (r.features[k] - m);
      const double sd = std::sqrt(v / n);
      mean[k] = m;
      scale[k] = sd > 0.0 ? sd : 1.0;
    }
    return Standardizer(std::move(mean), std::move(scale), std::move(active));
  }

  std::vector<double> apply(std::span<const double> x) const
  {
    if (x.size() != mean_.size())
      throw InvalidArgument("feature vector length differs from standardizer");
    std::vector<double> z(x.begin(), x.end());
    for (std::size_t k = 0; k < z.size(); ++k)
      if (active_[k])
        z[k] = (z[k] - mean_[k]) / scale_[k];
    return z;
  }

  nlohmann::ordered_json to_json() const
  {
    nlohmann::ordered_json j;
    j["mean"] = mean_;
    j["scale"] = scale_;
    j["standardized"] = active_;
    return j;
  }

  static Standardizer from_json(const nlohmann::ordered_json& j)
  {
    return Standardizer(j.at("mean").get<std::vector<double>>(),
                        j.at("scale").get<std::vector<double>>(),
                        j.at("standardized").get<std::vector<bool>>());
  }

  std::size_t size() const { return mean_.size(); }

private:
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<bool> active_;
};

/// Regression data for one crime type: standardized features, the type's
/// share as response, GeoID as label.
inline GWRDataset to_dataset(std::span<const ModelRow> rows, CrimeType type, const Standardizer& standardizer)
{
  std::vector<Observation> obs;
  obs.reserve(rows.size());
  for (const auto& r : rows)
    obs.push_back({r.location, standardizer.apply(r.features), r.response(type), r.geoid});
  return GWRDataset(std::move(obs));
}

} // namespace gwr
