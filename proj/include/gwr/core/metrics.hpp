#pragma once

#include <cstddef>
#include <span>

#include "errors.hpp"

namespace gwr {

/// 1 - SS_res / SS_tot, with SS_tot taken about the mean of `actual`.
inline double r_squared(std::span<const double> actual, std::span<const double> predicted)
{
  if (actual.size() != predicted.size() || actual.empty())
    throw InvalidArgument("r_squared needs equal, nonzero lengths");
  double mean = 0.0;
  for (double a : actual)
    mean += a;
  mean /= static_cast<double>(actual.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (ss_tot == 0.0)
    throw ZeroVariance("r_squared: actual values have zero variance");
  return 1.0 - ss_res / ss_tot;
}

} // namespace gwr
