// electmap command line: scrape, convert, simplify, render, serve.

#include "electmap/analytics.hpp"
#include "electmap/datastore.hpp"
#include "electmap/error.hpp"
#include "electmap/geometry.hpp"
#include "electmap/ingest.hpp"
#include "electmap/join.hpp"
#include "electmap/render.hpp"
#include "electmap/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;
using namespace electmap;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const std::string s = read_text(path);
  return {s.begin(), s.end()};
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << content;
}

struct ElectionKey {
  ElectionType type;
  int year;
  std::optional<RegionLevel> level;
};

ElectionKey parse_election_key(const std::string& text) {
  static const std::regex pattern(R"(^(federal|provincial)_(\d{4})(_cd)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw Error(Errc::InvalidArgument, "election must look like provincial_2019 or federal_1963_cd");
  ElectionKey key{*parse_election_type(m[1].str()), std::stoi(m[2].str()), std::nullopt};
  if (m[3].matched) key.level = RegionLevel::CensusDivision;
  return key;
}

Service* g_service = nullptr;

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Election results pipeline: scrape, geometry, choropleth maps, trends, HTTP API"};
  app.require_subcommand(1);

  // scrape
  auto* scrape = app.add_subcommand("scrape", "Fetch one election and write it as CSV");
  std::string scrape_type, scrape_config, scrape_fixtures, scrape_out = "data", scrape_level = "province";
  int scrape_year = 0;
  scrape->add_option("--type", scrape_type, "federal or provincial")->required();
  scrape->add_option("--year", scrape_year, "Election year")->required();
  scrape->add_option("--config", scrape_config, "Site configuration (JSON)")->required()->check(CLI::ExistingFile);
  scrape->add_option("--fixtures", scrape_fixtures, "Replay recorded pages from this directory")
      ->check(CLI::ExistingDirectory);
  scrape->add_option("--out", scrape_out, "Output directory")->capture_default_str();
  scrape->add_option("--level", scrape_level, "province or cd")->capture_default_str();

  // convert
  auto* convert = app.add_subcommand("convert", "Shapefile (.shp + .dbf) to GeoJSON");
  std::string shp_path, dbf_path, convert_out, id_field = "PRUID", name_field = "PRNAME";
  convert->add_option("shp", shp_path)->required()->check(CLI::ExistingFile);
  convert->add_option("dbf", dbf_path)->required()->check(CLI::ExistingFile);
  convert->add_option("out", convert_out)->required();
  convert->add_option("--id", id_field, "Region id field")->capture_default_str();
  convert->add_option("--name", name_field, "Region name field")->capture_default_str();

  // simplify
  auto* simplify_cmd = app.add_subcommand("simplify", "Visvalingam-Whyatt simplification of GeoJSON");
  double retain = 1.0;
  std::string simplify_in, simplify_out;
  simplify_cmd->add_option("--retain", retain, "Fraction of vertices kept, in (0, 1]")->required();
  simplify_cmd->add_option("in", simplify_in)->required()->check(CLI::ExistingFile);
  simplify_cmd->add_option("out", simplify_out)->required();

  // render
  auto* render = app.add_subcommand("render", "Choropleth SVG for one election");
  std::string election_key, geom_path, render_out, data_root = "data", overrides_path, report_path;
  double render_retain = 1.0;
  int width = 960, height = 600;
  bool strict = false;
  render->add_option("--election", election_key, "e.g. provincial_2019")->required();
  render->add_option("--geom", geom_path, "Region GeoJSON")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output SVG")->required();
  render->add_option("--data", data_root, "Election CSV directory")->capture_default_str();
  render->add_option("--overrides", overrides_path, "Party color overrides (JSON)")->check(CLI::ExistingFile);
  render->add_option("--retain", render_retain, "Simplify before rendering")->capture_default_str();
  render->add_option("--width", width, "Width in pixels")->capture_default_str();
  render->add_option("--height", height, "Height in pixels")->capture_default_str();
  render->add_option("--report", report_path, "Write the join report (JSON) here");
  render->add_flag("--strict", strict, "Fail when any region is unmatched");

  // trend
  auto* trend_cmd = app.add_subcommand("trend", "Candidate-count trend with an OLS prediction");
  std::string trend_type;
  std::optional<double> trend_predict;
  trend_cmd->add_option("--data", data_root, "Election CSV directory")->capture_default_str();
  trend_cmd->add_option("--type", trend_type, "federal or provincial")->required();
  trend_cmd->add_option("--predict", trend_predict, "Year to predict");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string serve_config = "svc.cfg";
  serve->add_option("--config", serve_config, "Service config (JSON); $ELECTMAP_CONFIG overrides")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scrape) {
      const auto type = parse_election_type(scrape_type);
      if (!type) throw Error(Errc::InvalidArgument, "unknown election type " + scrape_type);
      const auto level = parse_region_level(scrape_level);
      if (!level) throw Error(Errc::InvalidArgument, "unknown level " + scrape_level);
      const auto site = SiteConfig::load(scrape_config);
      std::unique_ptr<Transport> transport;
      if (scrape_fixtures.empty())
        transport = std::make_unique<HttpTransport>();
      else
        transport = std::make_unique<FixtureTransport>(scrape_fixtures);
      const auto rows = scrape_election(*type, scrape_year, site, FetchPolicy{}, *transport);
      const auto path = write_election_csv(rows, *type, scrape_year, *level, scrape_out,
                                           WriteOptions{.allow_empty = true});
      std::cout << path.string() << ": " << rows.size() << " rows\n";
    } else if (*convert) {
      const auto shp = read_bytes(shp_path);
      const auto dbf = read_bytes(dbf_path);
      const auto features = parse_shapefile(shp, dbf, id_field, name_field);
      write_text(convert_out, to_geojson(features));
      std::cout << convert_out << ": " << features.features.size() << " features\n";
    } else if (*simplify_cmd) {
      const auto in = from_geojson(read_text(simplify_in));
      const auto out = simplify(in, retain);
      write_text(simplify_out, to_geojson(out));
      std::cout << simplify_out << ": " << in.vertex_count() << " -> " << out.vertex_count()
                << " vertices\n";
    } else if (*render) {
      const auto key = parse_election_key(election_key);
      const auto catalog = build_catalog(data_root);
      const auto* entry = key.level ? catalog.find(key.type, key.year, *key.level)
                                    : catalog.find(key.type, key.year, RegionLevel::Province);
      if (!entry) throw Error(Errc::InvalidArgument, election_key + " is not in " + data_root);
      const auto rows = read_election_csv(entry->path);
      auto features = from_geojson(read_text(geom_path));
      if (render_retain < 1.0) features = simplify(features, render_retain);
      const auto joined = merge_results_with_geometry(rows, entry->level, features, strict);
      if (!report_path.empty()) write_text(report_path, joined.report.to_json());
      std::vector<std::string> parties;
      for (const auto& r : joined.regions) parties.push_back(r.winner_party);
      std::map<std::string, std::string> overrides;
      if (!overrides_path.empty()) overrides = load_color_overrides(overrides_path);
      std::vector<RegionFeature> unmatched;
      for (RegionId id : joined.report.unmatched_geometry_ids) unmatched.push_back(*features.find(id));
      const RenderSize size{width, height};
      const std::string svg = joined.regions.empty()
                                  ? render_outline(features, size)
                                  : render_choropleth(joined.regions,
                                                      assign_party_colors(parties, overrides), size,
                                                      unmatched);
      write_text(render_out, svg);
      std::cout << render_out << ": " << joined.report.matched << " regions, "
                << joined.report.unmatched_geometry_ids.size() << " unmatched\n";
    } else if (*trend_cmd) {
      const auto type = parse_election_type(trend_type);
      if (!type) throw Error(Errc::InvalidArgument, "unknown election type " + trend_type);
      const auto trend = candidate_trend(build_catalog(data_root), *type);
      auto body = to_json(trend);
      if (trend_predict) body["prediction"] = {{"x", *trend_predict}, {"y", predict(trend.model, *trend_predict)}};
      std::cout << body.dump(2) << '\n';
    } else if (*serve) {
      const auto path = resolve_config_path(serve_config);
      Service service(ServiceConfig::load(path));
      const int port = service.bind();
      g_service = &service;
      std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
      });
      std::cerr << "serving on port " << port << " (config " << path.string() << ")\n";
      service.listen();
      g_service = nullptr;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
