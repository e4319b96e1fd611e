// gwrcrime: command-line driver for ingestion, statistics, model fitting,
// holdout evaluation, heat maps, risk queries and the HTTP service.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "gwr/experiment.hpp"
#include "gwr/gwr.hpp"
#include "gwr/ingest.hpp"
#include "gwr/service.hpp"
#include "gwr/stats.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct InputOptions
{
  std::string crimes;
  std::string demographics;
  std::string weather;
  std::string columns;
  int min_support = 5;
  std::string rejects_dir;
  std::string coverage;
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool need_demographics = true)
{
  cmd->add_option("--crimes", in.crimes, "Crime incidents CSV")->required()->check(CLI::ExistingFile);
  auto* demo = cmd->add_option("--demographics", in.demographics, "GeoID demographics CSV")->check(CLI::ExistingFile);
  if (need_demographics)
    demo->required();
  cmd->add_option("--weather", in.weather, "Daily weather CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--columns", in.columns, "Column-mapping config file")->check(CLI::ExistingFile);
  cmd->add_option("--min-support", in.min_support, "Minimum incidents per (geoid, year, bucket) cell");
  cmd->add_option("--rejects-dir", in.rejects_dir, "Write <source>_rejects.csv files here");
  cmd->add_option("--coverage", in.coverage, "Write the coverage report JSON here");
}

std::ifstream open_in(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw gwr::InvalidArgument("cannot open " + path);
  return in;
}

std::ofstream open_out(const fs::path& path)
{
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw gwr::InvalidArgument("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const Json& j)
{
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

struct Inputs
{
  std::vector<gwr::CrimeIncident> incidents;
  std::vector<std::string> ethnicity_names;
  std::vector<gwr::GeoUnit> units;
  std::vector<gwr::WeatherDay> weather_days;
};

template <class T>
void report_rejects(const std::string& source, const gwr::ParseResult<T>& r, const InputOptions& opt)
{
  if (!r.rejects.empty())
    std::cerr << source << ": " << r.rejects.size() << " of " << r.rows_read << " rows rejected\n";
  if (!opt.rejects_dir.empty()) {
    auto out = open_out(fs::path(opt.rejects_dir) / (source + "_rejects.csv"));
    gwr::write_rejects_csv(out, r.rejects);
  }
}

Inputs read_inputs(const InputOptions& opt)
{
  gwr::ColumnMap cols;
  if (!opt.columns.empty())
    cols = gwr::ColumnMap::from_config(gwr::KeyValueConfig::load(opt.columns));
  Inputs in;
  {
    auto f = open_in(opt.crimes);
    auto r = gwr::parse_crimes(f, cols.crimes);
    report_rejects("crimes", r, opt);
    in.incidents = std::move(r.records);
  }
  if (!opt.demographics.empty()) {
    auto f = open_in(opt.demographics);
    auto d = gwr::parse_demographics(f, cols.demographics);
    report_rejects("demographics", d.units, opt);
    in.ethnicity_names = std::move(d.ethnicity_names);
    in.units = std::move(d.units.records);
  }
  {
    auto f = open_in(opt.weather);
    auto r = gwr::parse_weather(f, cols.weather);
    report_rejects("weather", r, opt);
    in.weather_days = std::move(r.records);
  }
  return in;
}

gwr::ModelRowsResult model_rows(const Inputs& in, const gwr::WeatherTable& weather, const InputOptions& opt)
{
  gwr::ModelRowOptions ro;
  ro.min_support = opt.min_support;
  auto rows = gwr::build_model_rows(in.incidents, in.units, in.ethnicity_names, weather, ro);
  if (!opt.coverage.empty())
    write_json(opt.coverage, rows.coverage.to_json());
  return rows;
}

struct BandwidthOptions
{
  std::optional<double> bandwidth;
  std::vector<double> grid;

  gwr::BandwidthChoice choice() const { return {bandwidth, grid}; }
};

void add_bandwidth_options(CLI::App* cmd, BandwidthOptions& b)
{
  auto* fixed = cmd->add_option("--bandwidth", b.bandwidth, "Fixed Gaussian bandwidth in km");
  auto* grid = cmd->add_option("--grid", b.grid, "Candidate bandwidths (km) for LOO-CV selection")->delimiter(',');
  fixed->excludes(grid);
}

std::vector<gwr::CrimeType> crime_types(const std::vector<std::string>& names)
{
  if (names.empty())
    return {gwr::kAllCrimeTypes.begin(), gwr::kAllCrimeTypes.end()};
  std::vector<gwr::CrimeType> out;
  for (const auto& n : names) {
    const auto t = gwr::parse_crime_type(n);
    if (!t)
      throw gwr::InvalidArgument("unknown crime type '" + n + "'");
    out.push_back(*t);
  }
  return out;
}

std::string year_label(std::optional<int> year) { return year ? std::to_string(*year) : "all"; }

// ---- synthetic -------------------------------------------------------------

struct SyntheticOptions
{
  std::string out = "data";
  gwr::CitySpec city;
};

void run_synthetic(const SyntheticOptions& o)
{
  const auto city = gwr::generate_city(o.city);
  const fs::path dir(o.out);
  auto crimes = open_out(dir / "crimes.csv");
  gwr::write_crimes_csv(crimes, city.incidents);
  auto demo = open_out(dir / "demographics.csv");
  gwr::write_demographics_csv(demo, city);
  auto weather = open_out(dir / "weather.csv");
  gwr::write_weather_csv(weather, city.weather);
  std::cout << "wrote " << city.incidents.size() << " incidents, " << city.units.size() << " GeoIDs, "
            << city.weather.size() << " weather days to " << dir.string() << '\n';
}

// ---- fit -------------------------------------------------------------------

struct FitOptions
{
  InputOptions input;
  BandwidthOptions bandwidth;
  std::optional<int> year;
  std::string out = "model.json";
};

void run_fit(const FitOptions& o)
{
  const auto in = read_inputs(o.input);
  const gwr::WeatherTable weather(in.weather_days);
  const auto rows = model_rows(in, weather, o.input);
  gwr::BundleOptions bo;
  bo.bandwidth = o.bandwidth.choice();
  bo.year = o.year;
  const auto bundle = gwr::fit_bundle(rows.rows, rows.layout, in.units, weather, bo);
  auto out = open_out(o.out);
  out << bundle.to_json().dump() << '\n';
  std::cout << "model " << bundle.model_version << ": " << bundle.training.size() << " rows, "
            << bundle.regression_points() << " regression points";
  for (gwr::CrimeType t : gwr::kAllCrimeTypes)
    std::cout << ", " << gwr::key_of(t) << " h=" << bundle.model(t).kernel().bandwidth_km() << " km";
  std::cout << '\n';
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOptions
{
  InputOptions input;
  BandwidthOptions bandwidth;
  std::vector<std::string> crime_types;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool shared_bandwidth = false;
  std::string out = "evaluation";
};

void run_evaluate(const EvaluateOptions& o)
{
  const auto in = read_inputs(o.input);
  const gwr::WeatherTable weather(in.weather_days);
  const auto rows = model_rows(in, weather, o.input);
  const gwr::SplitSpec split{o.test_fraction, o.seed};
  const fs::path dir(o.out);
  for (gwr::CrimeType t : crime_types(o.crime_types)) {
    const auto report =
        gwr::run_yearly_evaluation(rows.rows, rows.layout, t, o.bandwidth.choice(), split, o.shared_bandwidth);
    const std::string key(gwr::key_of(t));
    auto scatter = open_out(dir / ("scatter_" + key + ".csv"));
    gwr::write_scatter_csv(scatter, report);
    write_json(dir / ("metrics_" + key + ".json"), gwr::metrics_json(report));
    for (const auto& y : report.years) {
      std::cout << key << ' ' << y.year << ": R2=";
      if (y.r_squared)
        std::cout << *y.r_squared;
      else
        std::cout << "n/a";
      std::cout << " h=" << y.bandwidth_km << " km, " << y.n_test << " test rows";
      if (y.n_refit_fallback)
        std::cout << " (" << y.n_refit_fallback << " refit at point)";
      std::cout << '\n';
    }
  }
}

// ---- heatmap ---------------------------------------------------------------

struct HeatmapOptions
{
  std::string model;
  std::vector<std::string> crime_types;
  std::vector<double> bbox;
  std::size_t resolution = 20;
  int hour = 14;
  std::optional<double> temp_f;
  std::optional<int> year;
  std::string out = "heatmaps";
};

gwr::BoundingBox centroid_bbox(const gwr::ModelBundle& b)
{
  gwr::BoundingBox box{180.0, 90.0, -180.0, -90.0};
  for (const auto& u : b.geounits) {
    box.min_lon = std::min(box.min_lon, u.centroid.lon());
    box.min_lat = std::min(box.min_lat, u.centroid.lat());
    box.max_lon = std::max(box.max_lon, u.centroid.lon());
    box.max_lat = std::max(box.max_lat, u.centroid.lat());
  }
  return box;
}

void run_heatmap(const HeatmapOptions& o)
{
  const auto bundle = gwr::ModelBundle::load(o.model);
  gwr::BoundingBox box;
  if (o.bbox.empty())
    box = centroid_bbox(bundle);
  else if (o.bbox.size() == 4)
    box = {o.bbox[0], o.bbox[1], o.bbox[2], o.bbox[3]};
  else
    throw gwr::InvalidArgument("--bbox takes min_lon,min_lat,max_lon,max_lat");
  const double temp = o.temp_f ? *o.temp_f : bundle.default_temp_f;
  const std::optional<int> year = o.year ? o.year : bundle.year;

  // Demographics of the nearest GeoUnit, with the fixed temporal context.
  const gwr::FeatureProvider features = [&](const gwr::GeoPoint& p) {
    double d = 0.0;
    const auto& unit = gwr::nearest_unit(bundle, p, d);
    return bundle.standardizer.apply(bundle.layout.build(unit, o.hour, temp));
  };

  for (gwr::CrimeType t : crime_types(o.crime_types)) {
    const std::string key(gwr::key_of(t));
    const auto grid = gwr::heatmap(bundle.model(t), bundle.dataset(t), box, o.resolution, features, key, year);
    const fs::path path = fs::path(o.out) / (key + "_" + year_label(year) + ".geojson");
    auto out = open_out(path);
    gwr::export_geojson(grid, out);
    std::size_t empty = 0;
    for (const auto& v : grid.values)
      empty += v ? 0 : 1;
    std::cout << "wrote " << path.string();
    if (empty)
      std::cout << " (" << empty << " cells without a well-posed fit)";
    std::cout << '\n';
  }
}

// ---- stats -----------------------------------------------------------------

struct StatsOptions
{
  InputOptions input;
  std::optional<std::string> crime_type;
  double temp_bin_width = 5.0;
  bool check_shift_change = false;
  std::string out = "stats";
};

Json mode_labels(const gwr::stats::Histogram& h)
{
  auto a = Json::array();
  for (std::size_t m : gwr::stats::find_modes(h))
    a.push_back(h.labels[m]);
  return a;
}

int run_stats(const StatsOptions& o)
{
  const auto in = read_inputs(o.input);
  const gwr::WeatherTable weather(in.weather_days);
  std::optional<gwr::CrimeType> filter;
  if (o.crime_type)
    filter = crime_types({*o.crime_type}).front();
  const fs::path dir(o.out);

  const auto hours = gwr::stats::hour_histogram(in.incidents, filter);
  const auto months = gwr::stats::month_histogram(in.incidents, filter);
  const auto temps = gwr::stats::temperature_histogram(in.incidents, weather, filter, o.temp_bin_width);
  const auto profile = gwr::stats::month_temperature_profile(in.incidents, weather, filter);
  {
    auto f = open_out(dir / "hour_histogram.csv");
    gwr::stats::write_histogram_csv(f, hours);
  }
  {
    auto f = open_out(dir / "month_histogram.csv");
    gwr::stats::write_histogram_csv(f, months);
  }
  {
    auto f = open_out(dir / "temperature_histogram.csv");
    gwr::stats::write_histogram_csv(f, temps);
  }
  {
    auto f = open_out(dir / "month_profile.csv");
    gwr::stats::write_month_profile_csv(f, profile);
  }

  Json summary;
  summary["crime_filter"] = filter ? Json(std::string(gwr::key_of(*filter))) : Json(nullptr);
  summary["incidents"] = hours.total();
  summary["modes"]["hour"] = mode_labels(hours);
  summary["modes"]["month"] = mode_labels(months);
  summary["modes"]["temperature"] = mode_labels(temps);
  std::optional<double> shift_r;
  try {
    shift_r = gwr::stats::shift_change_correlation(hours);
    summary["shift_change_r"] = *shift_r;
  } catch (const gwr::ConstantInput&) {
    summary["shift_change_r"] = nullptr;
  }

  if (!in.units.empty()) {
    const auto rows = model_rows(in, weather, o.input);
    try {
      const auto c =
          gwr::stats::feature_response_correlation(rows.rows, rows.layout, "property_rate", gwr::CrimeType::Burglary);
      summary["property_rate_burglary_r"] = c.r;
      auto f = open_out(dir / "property_rate_burglary.csv");
      gwr::stats::write_pairs_csv(f, "property_rate", gwr::CrimeType::Burglary, c);
    } catch (const gwr::ConstantInput&) {
      summary["property_rate_burglary_r"] = nullptr;
    } catch (const gwr::InvalidArgument&) {
      summary["property_rate_burglary_r"] = nullptr;
    }
  }
  write_json(dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';

  if (o.check_shift_change) {
    if (!shift_r || std::abs(*shift_r) >= 0.2) {
      std::cerr << "shift-change check failed: |r| must be below 0.2\n";
      return 2;
    }
    std::cout << "shift-change check passed: |r| = " << std::abs(*shift_r) << " < 0.2\n";
  }
  return 0;
}

// ---- risk / serve ----------------------------------------------------------

struct RiskOptions
{
  std::string model;
  gwr::RiskQuery query;
  std::optional<double> temp_f;
  double radius_km = gwr::kDefaultResolveRadiusKm;
};

void run_risk(RiskOptions o)
{
  const auto bundle = gwr::ModelBundle::load(o.model);
  o.query.temp_f = o.temp_f;
  std::cout << gwr::to_json(gwr::predict_risk(bundle, o.query, o.radius_km)).dump(2) << '\n';
}

struct ServeOptions
{
  std::string config;
  std::optional<std::string> listen_address;
  std::optional<int> port;
  std::optional<std::string> model;
  std::optional<std::string> heatmap_dir;
  std::optional<std::string> climatology;
};

int run_serve(const ServeOptions& o)
{
  gwr::KeyValueConfig file;
  if (!o.config.empty())
    file = gwr::KeyValueConfig::load(o.config);
  auto cfg = gwr::ServiceConfig::from_config(file);
  cfg.apply_env();
  if (o.listen_address)
    cfg.listen_address = *o.listen_address;
  if (o.port)
    cfg.port = *o.port;
  if (o.model)
    cfg.model_path = *o.model;
  if (o.heatmap_dir)
    cfg.heatmap_dir = *o.heatmap_dir;
  if (o.climatology)
    cfg.climatology_path = *o.climatology;
  if (cfg.model_path.empty())
    throw gwr::InvalidArgument("no model path configured");

  gwr::RiskService service(cfg);
  httplib::Server server;
  service.bind(server);
  if (!server.bind_to_port(cfg.listen_address, cfg.port)) {
    std::cerr << "error: cannot listen on " << cfg.listen_address << ':' << cfg.port << '\n';
    return 1;
  }
  std::thread loader([&] {
    try {
      service.load_from_file(cfg.model_path);
      std::cerr << "model " << service.bundle()->model_version << " loaded from " << cfg.model_path << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: loading " << cfg.model_path << ": " << e.what() << '\n';
      server.stop();
    }
  });
  std::cerr << "listening on " << cfg.listen_address << ':' << cfg.port << '\n';
  server.listen_after_bind();
  loader.join();
  return service.bundle() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Geographically weighted regression of crime-type shares"};
  app.require_subcommand(1);

  SyntheticOptions syn;
  auto* c_syn = app.add_subcommand("synthetic", "Generate a synthetic city (crimes, demographics, weather CSVs)");
  c_syn->add_option("--out", syn.out, "Output directory");
  c_syn->add_option("--seed", syn.city.seed, "Random seed");
  c_syn->add_option("--geoids", syn.city.n_geoids, "Number of GeoIDs");
  c_syn->add_option("--first-year", syn.city.first_year);
  c_syn->add_option("--last-year", syn.city.last_year);
  c_syn->add_option("--mean-incidents", syn.city.mean_incidents, "Mean incidents per GeoID and year");

  FitOptions fit;
  auto* c_fit = app.add_subcommand("fit", "Fit one model per crime type and write the model bundle");
  add_input_options(c_fit, fit.input);
  add_bandwidth_options(c_fit, fit.bandwidth);
  c_fit->add_option("--year", fit.year, "Fit on this year's rows only");
  c_fit->add_option("--out", fit.out, "Model bundle JSON path");

  EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "Per-year holdout evaluation with GeoID-averaged prediction");
  add_input_options(c_ev, ev.input);
  add_bandwidth_options(c_ev, ev.bandwidth);
  c_ev->add_option("--crime-type", ev.crime_types, "Crime type(s); default all six");
  c_ev->add_option("--test-fraction", ev.test_fraction, "Held-out fraction per year")->check(CLI::Range(0.0, 1.0));
  c_ev->add_option("--seed", ev.seed, "Split seed");
  c_ev->add_flag("--shared-bandwidth", ev.shared_bandwidth, "Select one bandwidth on all training rows");
  c_ev->add_option("--out", ev.out, "Output directory");

  HeatmapOptions hm;
  auto* c_hm = app.add_subcommand("heatmap", "Predict a probability lattice and write GeoJSON");
  c_hm->add_option("--model", hm.model, "Model bundle JSON")->required()->check(CLI::ExistingFile);
  c_hm->add_option("--crime-type", hm.crime_types, "Crime type(s); default all six");
  c_hm->add_option("--bbox", hm.bbox, "min_lon,min_lat,max_lon,max_lat; default GeoID centroid extent")
      ->delimiter(',');
  c_hm->add_option("--resolution", hm.resolution, "Cells per axis");
  c_hm->add_option("--hour", hm.hour, "Hour of day for the time bucket (default 14, afternoon)")
      ->check(CLI::Range(0, 23));
  c_hm->add_option("--temp", hm.temp_f, "Temperature in F (default: the model year's mean)");
  c_hm->add_option("--year", hm.year, "Year label for the output (default: the model's year)");
  c_hm->add_option("--out", hm.out, "Output directory");

  StatsOptions st;
  auto* c_st = app.add_subcommand("stats", "Descriptive statistics as CSV plus a JSON summary");
  add_input_options(c_st, st.input, false);
  c_st->add_option("--crime-type", st.crime_type, "Restrict to one crime type");
  c_st->add_option("--temp-bin-width", st.temp_bin_width, "Temperature bin width in F");
  c_st->add_flag("--check-shift-change", st.check_shift_change,
                 "Exit non-zero unless |r| with the shift-change indicator is below 0.2");
  c_st->add_option("--out", st.out, "Output directory");

  RiskOptions rk;
  auto* c_rk = app.add_subcommand("risk", "Answer one risk query from a model bundle");
  c_rk->add_option("--model", rk.model, "Model bundle JSON")->required()->check(CLI::ExistingFile);
  c_rk->add_option("--lat", rk.query.lat)->required();
  c_rk->add_option("--lon", rk.query.lon)->required();
  c_rk->add_option("--hour", rk.query.hour)->required();
  c_rk->add_option("--month", rk.query.month)->required();
  c_rk->add_option("--temp", rk.temp_f, "Temperature in F (default: monthly climatology)");
  c_rk->add_option("--radius", rk.radius_km, "GeoID resolution radius in km");

  ServeOptions sv;
  auto* c_sv = app.add_subcommand("serve", "Run the HTTP risk service");
  c_sv->add_option("--config", sv.config, "Service config file ([service] section)")->check(CLI::ExistingFile);
  c_sv->add_option("--listen", sv.listen_address, "Listen address");
  c_sv->add_option("--port", sv.port, "Port");
  c_sv->add_option("--model", sv.model, "Model bundle JSON");
  c_sv->add_option("--heatmap-dir", sv.heatmap_dir, "Directory of precomputed <type>_<year>.geojson files");
  c_sv->add_option("--climatology", sv.climatology, "CSV of month,avg_temp_f");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_syn)
      run_synthetic(syn);
    else if (*c_fit)
      run_fit(fit);
    else if (*c_ev)
      run_evaluate(ev);
    else if (*c_hm)
      run_heatmap(hm);
    else if (*c_st)
      return run_stats(st);
    else if (*c_rk)
      run_risk(rk);
    else if (*c_sv)
      return run_serve(sv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
