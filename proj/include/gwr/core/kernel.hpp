#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace gwr {

enum class KernelKind
{
  gaussian,
};

inline std::string_view to_string(KernelKind kind)
{
  switch (kind) {
    case KernelKind::gaussian:
      return "gaussian";
  }
  return "unknown";
}

inline KernelKind kernel_kind_from_string(std::string_view name)
{
  if (name == "gaussian")
    return KernelKind::gaussian;
  throw InvalidArgument("unknown kernel kind: " + std::string(name));
}

/// Fixed-bandwidth distance-decay kernel. Bandwidth is in kilometers.
class KernelSpec
{
public:
  explicit KernelSpec(double bandwidth_km, KernelKind kind = KernelKind::gaussian)
    : bandwidth_km_(bandwidth_km), kind_(kind)
  {
    if (!(bandwidth_km > 0.0) || !std::isfinite(bandwidth_km))
      throw InvalidArgument("kernel bandwidth must be positive and finite");
  }

  double bandwidth_km() const { return bandwidth_km_; }
  KernelKind kind() const { return kind_; }

  bool operator==(const KernelSpec&) const = default;

private:
  double bandwidth_km_;
  KernelKind kind_;
};

/// exp(-(d/h)^2); 1 at d = 0 and strictly decreasing in d.
inline double kernel_weight(double distance_km, const KernelSpec& kernel)
{
  const double r = distance_km / kernel.bandwidth_km();
  return std::exp(-r * r);
}

} // namespace gwr
