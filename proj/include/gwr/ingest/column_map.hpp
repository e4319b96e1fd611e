#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <string>

#include "../core/errors.hpp"
#include "csv.hpp"

namespace gwr {

/// Flat `key = "value"` configuration with optional [section] headers.
/// Keys inside a section are stored as "section.key". '#' starts a comment.
class KeyValueConfig
{
public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in)
  {
    KeyValueConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string text = csv::trim(strip_comment(line));
      if (!text.empty() && text.back() == '\r')
        text.pop_back();
      if (text.empty())
        continue;
      if (text.front() == '[') {
        if (text.back() != ']')
          throw InvalidArgument("config line " + std::to_string(line_no) + ": bad section header");
        section = csv::trim(text.substr(1, text.size() - 2));
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos)
        throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
      std::string key = csv::trim(text.substr(0, eq));
      std::string value = csv::trim(text.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      if (key.empty())
        throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
      cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw InvalidArgument("cannot open config file " + path);
    return parse(in);
  }

  std::string get(const std::string& key, const std::string& fallback) const
  {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
  static std::string strip_comment(const std::string& line)
  {
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"')
        in_quotes = !in_quotes;
      else if (line[i] == '#' && !in_quotes)
        return line.substr(0, i);
    }
    return line;
  }

  std::map<std::string, std::string> values_;
};

/// Source column names for the three input CSVs. Defaults equal the keys.
struct ColumnMap
{
  struct Crimes
  {
    std::string occurred_at = "occurred_at";
    std::string geoid = "geoid";
    std::string lon = "lon";
    std::string lat = "lat";
    std::string crime_type = "crime_type";
  } crimes;

  struct Demographics
  {
    std::string geoid = "geoid";
    std::string lon = "lon";
    std::string lat = "lat";
    std::string population_density = "population_density";
    std::string property_rate = "property_rate";
    std::string median_age = "median_age";
    /// Every column whose name starts with this prefix is an ethnicity share.
    std::string ethnicity_prefix = "eth_";
  } demographics;

  struct Weather
  {
    std::string date = "date";
    std::string avg_temp_f = "avg_temp_f";
    std::string snowfall_in = "snowfall_in";
  } weather;

  static ColumnMap from_config(const KeyValueConfig& cfg)
  {
    ColumnMap m;
    auto pick = [&](const char* key, std::string& slot) { slot = cfg.get(key, slot); };
    pick("crimes.occurred_at", m.crimes.occurred_at);
    pick("crimes.geoid", m.crimes.geoid);
    pick("crimes.lon", m.crimes.lon);
    pick("crimes.lat", m.crimes.lat);
    pick("crimes.crime_type", m.crimes.crime_type);
    pick("demographics.geoid", m.demographics.geoid);
    pick("demographics.lon", m.demographics.lon);
    pick("demographics.lat", m.demographics.lat);
    pick("demographics.population_density", m.demographics.population_density);
    pick("demographics.property_rate", m.demographics.property_rate);
    pick("demographics.median_age", m.demographics.median_age);
    pick("demographics.ethnicity_prefix", m.demographics.ethnicity_prefix);
    pick("weather.date", m.weather.date);
    pick("weather.avg_temp_f", m.weather.avg_temp_f);
    pick("weather.snowfall_in", m.weather.snowfall_in);
    return m;
  }
};

} // namespace gwr
