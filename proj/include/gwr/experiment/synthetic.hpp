#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../core/dataset.hpp"
#include "../core/errors.hpp"
#include "../core/geo.hpp"

namespace gwr {

/// Analytic coefficient surface over the unit-normalized bbox coordinates
/// (u', v') in [0, 1]^2.
struct Surface
{
  enum class Kind
  {
    constant,     // a
    linear_u,     // a + b u'
    sinusoidal_v, // a + b sin(pi v')
  };

  Kind kind = Kind::constant;
  double a = 0.0;
  double b = 0.0;

  static Surface constant(double a) { return {Kind::constant, a, 0.0}; }
  static Surface linear_u(double a, double b) { return {Kind::linear_u, a, b}; }
  static Surface sinusoidal_v(double a, double b) { return {Kind::sinusoidal_v, a, b}; }

  double at(double u01, double v01) const
  {
    switch (kind) {
      case Kind::constant:
        return a;
      case Kind::linear_u:
        return a + b * u01;
      case Kind::sinusoidal_v:
        return a + b * std::sin(std::numbers::pi * v01);
    }
    return a;
  }

  /// max - min over the unit square.
  double range() const { return kind == Kind::constant ? 0.0 : std::abs(b); }
};

struct SyntheticSpec
{
  std::size_t n_locations = 400;
  BoundingBox bbox{-77.70, 43.10, -77.50, 43.25};
  /// One surface per feature; surface 0 multiplies the intercept.
  std::vector<Surface> surfaces{Surface::linear_u(1.0, 1.0), Surface::sinusoidal_v(0.0, 1.0)};
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  /// Locations are labelled by the cell of a grid_cells x grid_cells lattice
  /// they fall in, standing in for GeoIDs.
  std::size_t grid_cells = 10;

  void validate() const
  {
    bbox.validate();
    if (n_locations < 10)
      throw InvalidArgument("synthetic data needs at least 10 locations");
    if (!(noise_sigma >= 0.0))
      throw InvalidArgument("noise_sigma must be >= 0");
    if (surfaces.empty())
      throw InvalidArgument("need at least the intercept surface");
    if (n_locations < surfaces.size())
      throw InvalidArgument("fewer locations than features");
    if (grid_cells == 0)
      throw InvalidArgument("grid_cells must be positive");
  }
};

struct SyntheticData
{
  GWRDataset data;
  /// Generating coefficients, one vector per row.
  std::vector<std::vector<double>> true_beta;
};

inline std::vector<double> surface_values(const SyntheticSpec& spec, const GeoPoint& p)
{
  const auto& b = spec.bbox;
  const double u01 = (p.lon() - b.min_lon) / (b.max_lon - b.min_lon);
  const double v01 = (p.lat() - b.min_lat) / (b.max_lat - b.min_lat);
  std::vector<double> beta;
  for (const auto& s : spec.surfaces)
    beta.push_back(s.at(u01, v01));
  return beta;
}

/// Locations uniform in the bbox, non-intercept features standard normal,
/// y = sum_k beta_k(u, v) x_k + N(0, noise_sigma^2).
inline SyntheticData generate_synthetic(const SyntheticSpec& spec)
{
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& b = spec.bbox;

  std::vector<Observation> rows;
  std::vector<std::vector<double>> truth;
  for (std::size_t i = 0; i < spec.n_locations; ++i) {
    const double u01 = unit(rng);
    const double v01 = unit(rng);
    const GeoPoint p(b.min_lon + u01 * (b.max_lon - b.min_lon), b.min_lat + v01 * (b.max_lat - b.min_lat));
    std::vector<double> x{1.0};
    for (std::size_t k = 1; k < spec.surfaces.size(); ++k)
      x.push_back(normal(rng));
    const auto beta = surface_values(spec, p);
    double y = dot(x, beta);
    const double eps = normal(rng);
    y += spec.noise_sigma * eps;
    const auto cx = std::min<std::size_t>(static_cast<std::size_t>(u01 * spec.grid_cells), spec.grid_cells - 1);
    const auto cy = std::min<std::size_t>(static_cast<std::size_t>(v01 * spec.grid_cells), spec.grid_cells - 1);
    rows.push_back({p, std::move(x), y, "cell_" + std::to_string(cx) + "_" + std::to_string(cy)});
    truth.push_back(beta);
  }
  return {GWRDataset(std::move(rows)), std::move(truth)};
}

} // namespace gwr
