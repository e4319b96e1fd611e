#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "../core/errors.hpp"

namespace gwr::csv {

/// One parsed record and the physical line it started on (1-based).
struct Record
{
  std::size_t line_no = 0;
  std::vector<std::string> fields;
};

/// Minimal RFC 4180 reader: comma separated, double-quote escaping, quoted
/// fields may span lines. Trailing '\r' is dropped.
class Reader
{
public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::optional<Record> next()
  {
    std::string line;
    if (!std::getline(in_, line))
      return std::nullopt;
    ++line_;
    Record rec;
    rec.line_no = line_;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i >= line.size()) {
        if (quoted) {
          std::string more;
          if (!std::getline(in_, more))
            break;
          ++line_;
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        break;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\r' && i + 1 == line.size()) {
      } else {
        field.push_back(c);
      }
      ++i;
    }
    rec.fields.push_back(std::move(field));
    return rec;
  }

private:
  std::istream& in_;
  std::size_t line_ = 0;
};

inline bool is_blank(const Record& r)
{
  return r.fields.size() == 1 && r.fields[0].find_first_not_of(" \t") == std::string::npos;
}

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> to_double(std::string_view s)
{
  const std::string t = trim(s);
  if (t.empty())
    return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

/// Column positions resolved from a header record.
class Header
{
public:
  explicit Header(const Record& header)
  {
    for (std::size_t i = 0; i < header.fields.size(); ++i)
      index_.emplace(trim(header.fields[i]), i);
    names_ = header.fields;
    for (auto& n : names_)
      n = trim(n);
  }

  std::optional<std::size_t> find(const std::string& name) const
  {
    auto it = index_.find(name);
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name, std::string_view what) const
  {
    auto i = find(name);
    if (!i)
      throw MalformedHeader(std::string(what) + ": missing required column '" + name + "'");
    return *i;
  }

  const std::vector<std::string>& names() const { return names_; }

private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
};

inline std::string escape(std::string_view s)
{
  if (s.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v)
{
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

} // namespace gwr::csv
