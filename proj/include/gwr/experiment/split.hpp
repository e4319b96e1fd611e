#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "../core/errors.hpp"

namespace gwr {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull)
{
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct SplitSpec
{
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const
  {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
      throw InvalidArgument("test_fraction must be in (0, 1)");
  }
};

template <class Row>
struct SplitResult
{
  std::vector<Row> train;
  std::vector<Row> test;
};

/// Holdout split stratified by year. Within each year, rows are ranked by a
/// hash of (seed, identity) and the first round(fraction * n) go to test,
/// keeping at least one row on each side when the year has two or more.
/// Both outputs keep the input order.
template <class Row, class IdentityFn, class YearFn>
SplitResult<Row> split(std::span<const Row> rows, const SplitSpec& spec, IdentityFn identity, YearFn year_of_row)
{
  spec.validate();
  std::map<int, std::vector<std::size_t>> by_year;
  for (std::size_t i = 0; i < rows.size(); ++i)
    by_year[year_of_row(rows[i])].push_back(i);

  std::vector<bool> is_test(rows.size(), false);
  for (auto& [year, idx] : by_year) {
    std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
    for (std::size_t i : idx)
      ranked.emplace_back(mix64(fnv1a(identity(rows[i])) ^ mix64(spec.seed)), i);
    std::sort(ranked.begin(), ranked.end());
    const std::size_t n = idx.size();
    auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
    if (n >= 2)
      n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    else
      n_test = 0;
    for (std::size_t k = 0; k < n_test; ++k)
      is_test[ranked[k].second] = true;
  }

  SplitResult<Row> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    (is_test[i] ? out.test : out.train).push_back(rows[i]);
  return out;
}

} // namespace gwr
