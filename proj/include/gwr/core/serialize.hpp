#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "model.hpp"

namespace gwr {

inline constexpr int kModelFormatVersion = 1;

/// JSON document: {version, kernel, feature_names, locals, diagnostics}.
inline nlohmann::ordered_json to_json(const FittedGWR& model)
{
  nlohmann::ordered_json doc;
  doc["version"] = kModelFormatVersion;
  doc["kernel"] = {{"kind", std::string(to_string(model.kernel().kind()))},
                   {"bandwidth_km", model.kernel().bandwidth_km()}};
  doc["feature_names"] = model.feature_names();
  auto locals = nlohmann::ordered_json::array();
  for (const auto& l : model.locals()) {
    nlohmann::ordered_json item;
    item["geoid"] = l.label;
    item["lon"] = l.point.lon();
    item["lat"] = l.point.lat();
    item["beta"] = l.beta;
    item["ridge_applied"] = l.ridge_applied;
    item["effective_weight_sum"] = l.effective_weight_sum;
    locals.push_back(std::move(item));
  }
  doc["locals"] = std::move(locals);
  const auto& d = model.diagnostics();
  nlohmann::ordered_json diag;
  if (d.global_r_squared)
    diag["global_r_squared"] = *d.global_r_squared;
  else
    diag["global_r_squared"] = nullptr;
  diag["residual_variance"] = d.residual_variance;
  diag["residuals"] = d.residuals;
  doc["diagnostics"] = std::move(diag);
  return doc;
}

inline FittedGWR model_from_json(const nlohmann::ordered_json& doc)
{
  if (doc.at("version").get<int>() != kModelFormatVersion)
    throw InvalidArgument("unsupported model format version");
  const auto& k = doc.at("kernel");
  KernelSpec kernel(k.at("bandwidth_km").get<double>(),
                    kernel_kind_from_string(k.at("kind").get<std::string>()));
  auto names = doc.at("feature_names").get<std::vector<std::string>>();
  std::vector<LocalFit> locals;
  for (const auto& item : doc.at("locals")) {
    LocalFit l;
    l.label = item.at("geoid").get<std::string>();
    l.point = GeoPoint(item.at("lon").get<double>(), item.at("lat").get<double>());
    l.beta = item.at("beta").get<std::vector<double>>();
    l.ridge_applied = item.at("ridge_applied").get<bool>();
    l.effective_weight_sum = item.value("effective_weight_sum", 0.0);
    locals.push_back(std::move(l));
  }
  FitDiagnostics diag;
  const auto& d = doc.at("diagnostics");
  if (!d.at("global_r_squared").is_null())
    diag.global_r_squared = d.at("global_r_squared").get<double>();
  diag.residual_variance = d.at("residual_variance").get<double>();
  diag.residuals = d.at("residuals").get<std::vector<double>>();
  return FittedGWR(kernel, std::move(locals), std::move(names), std::move(diag));
}

} // namespace gwr
