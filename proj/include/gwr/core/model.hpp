#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "local_fit.hpp"
#include "metrics.hpp"

namespace gwr {

struct FitDiagnostics
{
  /// Empty when the training responses are constant.
  std::optional<double> global_r_squared;
  std::vector<double> residuals;
  /// RSS / (n - p), or RSS / n when n == p.
  double residual_variance = 0.0;
};

/// A fitted model: one LocalFit per distinct training location.
/// Immutable once built.
class FittedGWR
{
public:
  FittedGWR(KernelSpec kernel,
            std::vector<LocalFit> locals,
            std::vector<std::string> feature_names,
            FitDiagnostics diagnostics)
    : kernel_(kernel)
    , locals_(std::move(locals))
    , feature_names_(std::move(feature_names))
    , diagnostics_(std::move(diagnostics))
  {
    for (std::size_t i = 0; i < locals_.size(); ++i) {
      if (locals_[i].beta.size() != feature_names_.size())
        throw InvalidArgument("local coefficient vector length differs from feature count");
      if (!by_point_.emplace(locals_[i].point, i).second)
        throw InvalidArgument("duplicate regression point in model");
      by_label_[locals_[i].label].push_back(i);
    }
  }

  const KernelSpec& kernel() const { return kernel_; }
  const std::vector<LocalFit>& locals() const { return locals_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }
  std::size_t p() const { return feature_names_.size(); }

  const LocalFit* local_at(const GeoPoint& point) const
  {
    auto it = by_point_.find(point);
    return it == by_point_.end() ? nullptr : &locals_[it->second];
  }

  std::vector<const LocalFit*> locals_with_label(std::string_view label) const
  {
    std::vector<const LocalFit*> out;
    auto it = by_label_.find(std::string(label));
    if (it != by_label_.end())
      for (std::size_t i : it->second)
        out.push_back(&locals_[i]);
    return out;
  }

private:
  KernelSpec kernel_;
  std::vector<LocalFit> locals_;
  std::vector<std::string> feature_names_;
  FitDiagnostics diagnostics_;
  std::map<GeoPoint, std::size_t> by_point_;
  std::map<std::string, std::vector<std::size_t>> by_label_;
};

inline std::vector<std::string> default_feature_names(std::size_t p)
{
  std::vector<std::string> names{"intercept"};
  for (std::size_t k = 1; k < p; ++k)
    names.push_back("x" + std::to_string(k));
  return names;
}

/// Fits one local regression per distinct location in `data`.
inline FittedGWR fit(const GWRDataset& data,
                     const KernelSpec& kernel,
                     std::vector<std::string> feature_names = {})
{
  if (feature_names.empty())
    feature_names = default_feature_names(data.p());
  if (feature_names.size() != data.p())
    throw InvalidArgument("feature_names length differs from feature count");

  std::vector<LocalFit> locals;
  std::map<GeoPoint, std::size_t> index;
  for (const auto& [point, label] : data.distinct_locations()) {
    LocalFit local = fit_local(point, data, kernel);
    local.label = label;
    index.emplace(point, locals.size());
    locals.push_back(std::move(local));
  }

  FitDiagnostics diag;
  std::vector<double> fitted;
  fitted.reserve(data.n());
  double rss = 0.0;
  for (const auto& row : data.rows()) {
    const double yhat = dot(row.features, locals[index.at(row.location)].beta);
    fitted.push_back(yhat);
    diag.residuals.push_back(row.response - yhat);
    rss += diag.residuals.back() * diag.residuals.back();
  }
  const auto y = data.responses();
  try {
    diag.global_r_squared = r_squared(y, fitted);
  } catch (const ZeroVariance&) {
    diag.global_r_squared.reset();
  }
  const std::size_t dof = data.n() > data.p() ? data.n() - data.p() : data.n();
  diag.residual_variance = rss / static_cast<double>(dof);

  return FittedGWR(kernel, std::move(locals), std::move(feature_names), std::move(diag));
}

enum class PredictionMode
{
  refit_at_point,
  geoid_average,
};

inline std::string_view to_string(PredictionMode mode)
{
  return mode == PredictionMode::refit_at_point ? "refit_at_point" : "geoid_average";
}

/// Componentwise mean of the coefficient vectors.
inline std::vector<double> average_beta(std::span<const LocalFit* const> fits)
{
  if (fits.empty())
    throw EmptyGeoID("no training fits belong to the requested GeoID");
  std::vector<double> mean(fits.front()->beta.size(), 0.0);
  for (const LocalFit* f : fits)
    for (std::size_t k = 0; k < mean.size(); ++k)
      mean[k] += f->beta[k];
  for (double& m : mean)
    m /= static_cast<double>(fits.size());
  return mean;
}

inline double predict_geoid_average(std::span<const LocalFit* const> fits,
                                    std::span<const double> features)
{
  const auto beta = average_beta(fits);
  if (features.size() != beta.size())
    throw InvalidArgument("feature vector length differs from model");
  return dot(features, beta);
}

inline double predict_refit(const FittedGWR& model,
                            const GWRDataset& training,
                            const GeoPoint& point,
                            std::span<const double> features)
{
  if (features.size() != model.p())
    throw InvalidArgument("feature vector length differs from model");
  const LocalFit local = fit_local(point, training, model.kernel());
  return dot(features, local.beta);
}

/// Predicts the response at `point`. In geoid_average mode the model's
/// LocalFits labelled `geoid` are averaged.
inline double predict(const FittedGWR& model,
                      const GWRDataset& training,
                      const GeoPoint& point,
                      std::span<const double> features,
                      PredictionMode mode,
                      std::string_view geoid = {})
{
  if (mode == PredictionMode::refit_at_point)
    return predict_refit(model, training, point, features);
  const auto fits = model.locals_with_label(geoid);
  if (fits.empty())
    throw EmptyGeoID("no training fits for GeoID '" + std::string(geoid) + "'");
  return predict_geoid_average(fits, features);
}

} // namespace gwr
