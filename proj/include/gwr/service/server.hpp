#pragma once

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "../core/errors.hpp"
#include "../experiment/bundle.hpp"
#include "../ingest/column_map.hpp"
#include "../ingest/crime_type.hpp"
#include "../ingest/csv.hpp"
#include "risk.hpp"

namespace gwr {

struct ServiceConfig
{
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::string model_path;
  std::string heatmap_dir = "heatmaps";
  std::string climatology_path;
  double radius_km = kDefaultResolveRadiusKm;

  /// Keys under [service]: listen_address, port, model_path, heatmap_dir,
  /// climatology_path, radius_km.
  static ServiceConfig from_config(const KeyValueConfig& cfg)
  {
    ServiceConfig c;
    c.listen_address = cfg.get("service.listen_address", c.listen_address);
    c.port = parse_port(cfg.get("service.port", std::to_string(c.port)));
    c.model_path = cfg.get("service.model_path", c.model_path);
    c.heatmap_dir = cfg.get("service.heatmap_dir", c.heatmap_dir);
    c.climatology_path = cfg.get("service.climatology_path", c.climatology_path);
    if (cfg.has("service.radius_km"))
      c.radius_km = parse_radius(cfg.get("service.radius_km", ""));
    return c;
  }

  /// GWR_LISTEN_ADDRESS, GWR_PORT, GWR_MODEL_PATH, GWR_HEATMAP_DIR,
  /// GWR_CLIMATOLOGY_PATH and GWR_RADIUS_KM override file settings.
  void apply_env(const std::function<const char*(const char*)>& getenv_fn = std::getenv)
  {
    if (const char* v = getenv_fn("GWR_LISTEN_ADDRESS"))
      listen_address = v;
    if (const char* v = getenv_fn("GWR_PORT"))
      port = parse_port(v);
    if (const char* v = getenv_fn("GWR_MODEL_PATH"))
      model_path = v;
    if (const char* v = getenv_fn("GWR_HEATMAP_DIR"))
      heatmap_dir = v;
    if (const char* v = getenv_fn("GWR_CLIMATOLOGY_PATH"))
      climatology_path = v;
    if (const char* v = getenv_fn("GWR_RADIUS_KM"))
      radius_km = parse_radius(v);
  }

private:
  static int parse_port(const std::string& s)
  {
    int port = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc() || ptr != s.data() + s.size() || port < 0 || port > 65535)
      throw InvalidArgument("invalid port '" + s + "'");
    return port;
  }

  static double parse_radius(const std::string& s)
  {
    const auto r = csv::to_double(s);
    if (!r || !(*r >= 0.0))
      throw InvalidArgument("invalid radius_km '" + s + "'");
    return *r;
  }
};

/// Reads `month,avg_temp_f` rows; months not listed stay empty.
inline std::array<std::optional<double>, 12> parse_climatology(std::istream& in)
{
  csv::Reader reader(in);
  auto head = reader.next();
  if (!head)
    throw EmptyInput("climatology file is empty");
  const csv::Header header(*head);
  const auto month_col = header.require("month", "climatology");
  const auto temp_col = header.require("avg_temp_f", "climatology");
  std::array<std::optional<double>, 12> out{};
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec))
      continue;
    const auto m = csv::to_double(rec->fields.at(month_col));
    const auto t = csv::to_double(rec->fields.at(temp_col));
    if (!m || !t || *m < 1 || *m > 12 || *m != static_cast<int>(*m))
      throw InvalidArgument("climatology line " + std::to_string(rec->line_no) + ": bad month or temperature");
    out[static_cast<std::size_t>(*m) - 1] = *t;
  }
  return out;
}

struct HttpResult
{
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handling over an immutable model bundle. Loading a new bundle
/// swaps the pointer; requests in flight keep the bundle they started with.
class RiskService
{
public:
  explicit RiskService(ServiceConfig config) : config_(std::move(config)) {}

  const ServiceConfig& config() const { return config_; }

  void load(ModelBundle bundle)
  {
    if (!config_.climatology_path.empty()) {
      std::ifstream in(config_.climatology_path);
      if (!in)
        throw InvalidArgument("cannot open climatology file " + config_.climatology_path);
      const auto clim = parse_climatology(in);
      for (std::size_t m = 0; m < 12; ++m)
        if (clim[m])
          bundle.climatology[m] = clim[m];
    }
    auto next = std::make_shared<const ModelBundle>(std::move(bundle));
    std::lock_guard lock(mutex_);
    bundle_ = std::move(next);
  }

  void load_from_file(const std::string& path) { load(ModelBundle::load(path)); }

  std::shared_ptr<const ModelBundle> bundle() const
  {
    std::lock_guard lock(mutex_);
    return bundle_;
  }

  HttpResult handle_health() const
  {
    const auto b = bundle();
    nlohmann::ordered_json j;
    j["status"] = b ? "ok" : "loading";
    j["model_version"] = b ? nlohmann::ordered_json(b->model_version) : nlohmann::ordered_json(nullptr);
    j["locals_count"] = b ? b->regression_points() : 0;
    return {200, j.dump()};
  }

  HttpResult handle_risk(const std::map<std::string, std::string>& params) const
  {
    const auto b = bundle();
    if (!b)
      return error(503, "model is still loading");
    RiskQuery q;
    try {
      q.lat = require_double(params, "lat");
      q.lon = require_double(params, "lon");
      q.hour = require_int(params, "hour");
      q.month = require_int(params, "month");
      if (auto it = params.find("temp_f"); it != params.end())
        q.temp_f = parse_double(it->second, "temp_f");
      return {200, to_json(predict_risk(*b, q, config_.radius_km)).dump()};
    } catch (const InvalidArgument& e) {
      return error(422, e.what());
    } catch (const DegenerateFit& e) {
      return error(422, std::string("no well-posed fit at this location: ") + e.what());
    }
  }

  HttpResult handle_heatmap(const std::string& crime_type, const std::string& year) const
  {
    const auto type = parse_crime_type(crime_type);
    if (!type || crime_type != key_of(*type)) {
      nlohmann::ordered_json j;
      j["error"] = "unknown crime type '" + crime_type + "'";
      auto allowed = nlohmann::ordered_json::array();
      for (CrimeType t : kAllCrimeTypes)
        allowed.push_back(std::string(key_of(t)));
      j["allowed"] = std::move(allowed);
      return {404, j.dump()};
    }
    int y = 0;
    const auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), y);
    if (ec != std::errc() || ptr != year.data() + year.size())
      return error(404, "year must be an integer");
    const std::string path = config_.heatmap_dir + "/" + crime_type + "_" + year + ".geojson";
    std::ifstream in(path, std::ios::binary);
    if (!in)
      return error(404, "no heat map for " + crime_type + " " + year);
    std::ostringstream body;
    body << in.rdbuf();
    return {200, body.str(), "application/geo+json"};
  }

  /// Registers GET /api/risk, /api/heatmap/{crime_type}/{year} and /api/health.
  void bind(httplib::Server& server) const
  {
    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) { write(res, handle_health()); });
    server.Get("/api/risk", [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> params;
      for (const auto& [k, v] : req.params)
        params.emplace(k, v);
      write(res, handle_risk(params));
    });
    server.Get(R"(/api/heatmap/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      write(res, handle_heatmap(req.matches[1], req.matches[2]));
    });
  }

private:
  static HttpResult error(int status, const std::string& message)
  {
    nlohmann::ordered_json j;
    j["error"] = message;
    return {status, j.dump()};
  }

  static void write(httplib::Response& res, const HttpResult& r)
  {
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  }

  static double parse_double(const std::string& s, const char* name)
  {
    const auto v = csv::to_double(s);
    if (!v)
      throw InvalidArgument(std::string(name) + " must be a number");
    return *v;
  }

  static double require_double(const std::map<std::string, std::string>& p, const char* name)
  {
    auto it = p.find(name);
    if (it == p.end())
      throw InvalidArgument(std::string("missing parameter ") + name);
    return parse_double(it->second, name);
  }

  static int require_int(const std::map<std::string, std::string>& p, const char* name)
  {
    auto it = p.find(name);
    if (it == p.end())
      throw InvalidArgument(std::string("missing parameter ") + name);
    int v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw InvalidArgument(std::string(name) + " must be an integer");
    return v;
  }

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ModelBundle> bundle_;
};

} // namespace gwr
