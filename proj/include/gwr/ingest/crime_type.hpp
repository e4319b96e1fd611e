#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace gwr {

enum class CrimeType
{
  AggravatedAssault,
  Burglary,
  Larceny,
  MotorVehicleTheft,
  Murder,
  Robbery,
};

inline constexpr std::size_t kCrimeTypeCount = 6;

inline constexpr std::array<CrimeType, kCrimeTypeCount> kAllCrimeTypes{
  CrimeType::AggravatedAssault, CrimeType::Burglary, CrimeType::Larceny,
  CrimeType::MotorVehicleTheft, CrimeType::Murder,   CrimeType::Robbery,
};

inline std::size_t index_of(CrimeType t) { return static_cast<std::size_t>(t); }

/// snake_case key used in JSON, file names and CLI flags.
inline std::string_view key_of(CrimeType t)
{
  static constexpr std::array<std::string_view, kCrimeTypeCount> keys{
    "aggravated_assault", "burglary", "larceny", "motor_vehicle_theft", "murder", "robbery"};
  return keys[index_of(t)];
}

inline std::string_view display_name(CrimeType t)
{
  static constexpr std::array<std::string_view, kCrimeTypeCount> names{
    "Aggravated Assault", "Burglary", "Larceny", "Motor Vehicle Theft", "Murder", "Robbery"};
  return names[index_of(t)];
}

/// Accepts any spelling that matches a type name after dropping case,
/// spaces, underscores and hyphens ("Motor Vehicle Theft", "larceny", ...).
inline std::optional<CrimeType> parse_crime_type(std::string_view text)
{
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s)
      if (std::isalnum(static_cast<unsigned char>(c)))
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
  };
  const std::string needle = squash(text);
  if (needle.empty())
    return std::nullopt;
  for (CrimeType t : kAllCrimeTypes)
    if (squash(key_of(t)) == needle)
      return t;
  return std::nullopt;
}

} // namespace gwr
