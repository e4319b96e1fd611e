#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "local_fit.hpp"

namespace gwr {

struct BandwidthScore
{
  double bandwidth_km = 0.0;
  /// Sum of squared leave-one-out errors; empty if some row was degenerate.
  std::optional<double> cv_score;
};

struct BandwidthSelection
{
  double best_bandwidth_km = 0.0;
  std::vector<BandwidthScore> scores;
};

/// Leave-one-out CV score: sum_i (y_i - x_i^T beta_{-i}(u_i, v_i))^2.
inline double loo_cv_score(const GWRDataset& data, const KernelSpec& kernel)
{
  double score = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& row = data[i];
    const LocalFit local = fit_local(row.location, data, kernel, i);
    const double err = row.response - dot(row.features, local.beta);
    score += err * err;
  }
  return score;
}

/// Picks the candidate with the lowest LOO-CV score. Ties go to the larger
/// bandwidth.
inline BandwidthSelection select_bandwidth(const GWRDataset& data,
                                           std::span<const double> candidates_km)
{
  if (candidates_km.empty())
    throw InvalidArgument("bandwidth grid is empty");
  for (double h : candidates_km)
    if (!(h > 0.0))
      throw InvalidArgument("bandwidth candidates must be positive");

  BandwidthSelection out;
  std::optional<std::size_t> best;
  for (double h : candidates_km) {
    BandwidthScore s{h, std::nullopt};
    try {
      s.cv_score = loo_cv_score(data, KernelSpec(h));
    } catch (const DegenerateFit&) {
    }
    out.scores.push_back(s);
    if (!s.cv_score)
      continue;
    if (!best) {
      best = out.scores.size() - 1;
      continue;
    }
    const auto& incumbent = out.scores[*best];
    if (*s.cv_score < *incumbent.cv_score ||
        (*s.cv_score == *incumbent.cv_score && h > incumbent.bandwidth_km))
      best = out.scores.size() - 1;
  }
  if (!best)
    throw AllCandidatesDegenerate("every bandwidth candidate produced a degenerate local fit");
  out.best_bandwidth_km = out.scores[*best].bandwidth_km;
  return out;
}

/// `count` log-spaced values from 0.1 x median to 10 x max pairwise distance
/// between distinct locations.
inline std::vector<double> default_bandwidth_grid(const GWRDataset& data, std::size_t count = 16)
{
  const auto locations = data.distinct_locations();
  std::vector<double> d;
  for (std::size_t i = 0; i < locations.size(); ++i)
    for (std::size_t j = i + 1; j < locations.size(); ++j)
      d.push_back(distance_km(locations[i].first, locations[j].first));
  if (d.empty())
    return {1.0};
  std::sort(d.begin(), d.end());
  const double median = d.size() % 2 == 1 ? d[d.size() / 2]
                                          : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  const double lo = 0.1 * median;
  const double hi = 10.0 * d.back();
  if (count <= 1 || !(lo > 0.0))
    return {hi};
  std::vector<double> grid;
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    grid.push_back(lo * std::exp(step * static_cast<double>(i)));
  return grid;
}

} // namespace gwr
