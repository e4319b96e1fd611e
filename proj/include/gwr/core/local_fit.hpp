#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "geo.hpp"
#include "kernel.hpp"
#include "linalg.hpp"

namespace gwr {

/// Weights at or below this value do not count toward the support of a fit.
inline constexpr double kNegligibleWeight = 1e-12;
/// Weighted Gram matrices with a pivot ratio above this get a ridge term.
inline constexpr double kMaxCondition = 1e12;
/// Ridge strength relative to trace(Gram) / p.
inline constexpr double kRidgeScale = 1e-8;

/// Coefficients of the weighted regression centred on one point.
struct LocalFit
{
  GeoPoint point;
  std::string label;
  std::vector<double> beta;
  double effective_weight_sum = 0.0;
  bool ridge_applied = false;
};

namespace detail {

inline std::vector<double> solve_normal_equations(linalg::SquareMatrix gram,
                                                  const std::vector<double>& rhs,
                                                  bool& ridge_applied)
{
  ridge_applied = false;
  auto factor = linalg::ldlt(gram);
  if (!factor || factor->condition_estimate() > kMaxCondition) {
    const double lambda = kRidgeScale * gram.trace() / static_cast<double>(gram.size());
    gram.add_to_diagonal(lambda);
    factor = linalg::ldlt(gram);
    ridge_applied = true;
  }
  if (!factor)
    return {};
  return factor->solve(rhs);
}

} // namespace detail

/// Minimizes sum_j w_j(point) (y_j - x_j^T beta)^2 with Gaussian weights.
/// Row `exclude_index`, when given, is left out (leave-one-out).
inline LocalFit fit_local(const GeoPoint& point,
                          const GWRDataset& data,
                          const KernelSpec& kernel,
                          std::optional<std::size_t> exclude_index = std::nullopt)
{
  if (exclude_index && *exclude_index >= data.n())
    throw InvalidArgument("exclude_index out of range");

  const std::size_t p = data.p();
  linalg::SquareMatrix gram(p);
  std::vector<double> rhs(p, 0.0);
  double weight_sum = 0.0;
  std::size_t support = 0;

  for (std::size_t j = 0; j < data.n(); ++j) {
    if (exclude_index && j == *exclude_index)
      continue;
    const auto& row = data[j];
    const double w = kernel_weight(distance_km(point, row.location), kernel);
    if (w <= 0.0)
      continue;
    if (w > kNegligibleWeight)
      ++support;
    weight_sum += w;
    gram.add_outer(row.features, w);
    for (std::size_t k = 0; k < p; ++k)
      rhs[k] += w * row.features[k] * row.response;
  }

  if (support < p)
    throw DegenerateFit("only " + std::to_string(support) + " rows carry weight at (" +
                          std::to_string(point.lon()) + ", " + std::to_string(point.lat()) +
                          "); need " + std::to_string(p) + " (bandwidth too small?)",
                        point.lon(),
                        point.lat());

  LocalFit fit;
  fit.point = point;
  fit.effective_weight_sum = weight_sum;
  fit.beta = detail::solve_normal_equations(std::move(gram), rhs, fit.ridge_applied);
  if (fit.beta.empty())
    throw DegenerateFit("weighted normal equations are not solvable", point.lon(), point.lat());
  return fit;
}

} // namespace gwr
