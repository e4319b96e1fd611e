#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "../core/errors.hpp"

namespace gwr::stats {

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw InvalidArgument("pearson: inputs differ in length");
  if (x.size() < 2)
    throw InvalidArgument("pearson: need at least two pairs");
  auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  if (constant(x) || constant(y))
    throw ConstantInput("pearson: an input is constant");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ConstantInput("pearson: an input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace gwr::stats
