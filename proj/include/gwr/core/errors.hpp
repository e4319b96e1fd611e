#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gwr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// Too few rows carry non-negligible weight at a regression point.
class DegenerateFit : public Error
{
public:
  DegenerateFit(const std::string& what, double lon, double lat)
    : Error(what), lon_(lon), lat_(lat)
  {
  }

  double lon() const { return lon_; }
  double lat() const { return lat_; }

private:
  double lon_;
  double lat_;
};

class AllCandidatesDegenerate : public Error
{
public:
  using Error::Error;
};

class EmptyGeoID : public Error
{
public:
  using Error::Error;
};

class ZeroVariance : public Error
{
public:
  using Error::Error;
};

class ConstantInput : public Error
{
public:
  using Error::Error;
};

class EmptyAfterFilter : public Error
{
public:
  using Error::Error;
};

class MalformedHeader : public Error
{
public:
  using Error::Error;
};

class EmptyInput : public Error
{
public:
  using Error::Error;
};

class UnknownGeoID : public Error
{
public:
  explicit UnknownGeoID(std::vector<std::string> offenders)
    : Error(make_message(offenders)), offenders_(std::move(offenders))
  {
  }

  const std::vector<std::string>& offenders() const { return offenders_; }

private:
  static std::string make_message(const std::vector<std::string>& ids)
  {
    std::string msg = "incidents reference unknown GeoIDs:";
    for (const auto& id : ids)
      msg += " " + id;
    return msg;
  }

  std::vector<std::string> offenders_;
};

class WeatherGap : public Error
{
public:
  using Error::Error;
};

class YearTooSmall : public Error
{
public:
  using Error::Error;
};

} // namespace gwr
