#include "electmap/analytics.hpp"
#include "electmap/error.hpp"
#include "electmap/join.hpp"
#include "electmap/render.hpp"
#include "electmap/service.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace electmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

} // namespace

ServiceConfig ServiceConfig::parse(std::string_view json_text, const fs::path& base_dir) {
  ServiceConfig config;
  try {
    const auto doc = json::parse(json_text);
    config.data_root = resolve(base_dir, doc.at("data_root").get<std::string>());
    const json geometry = doc.value("geometry", json::object());
    for (const auto& [level_name, path] : geometry.items()) {
      const auto level = parse_region_level(level_name);
      if (!level) throw Error(Errc::ConfigError, "unknown geometry level '" + level_name + "'");
      config.geometry_paths[*level] = resolve(base_dir, path.get<std::string>());
    }
    const std::string bind = doc.value("bind", std::string("127.0.0.1:8080"));
    const auto colon = bind.rfind(':');
    const auto port = colon == std::string::npos ? std::nullopt : text::parse_int(bind.substr(colon + 1));
    if (!port || *port < 0 || *port > 65535 || colon == 0)
      throw Error(Errc::ConfigError, "bind address '" + bind + "' is not host:port");
    config.bind_host = bind.substr(0, colon);
    config.bind_port = static_cast<int>(*port);
    if (doc.contains("palette_overrides"))
      config.palette_overrides = resolve(base_dir, doc.at("palette_overrides").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("service config: ") + e.what());
  }
  return config;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  return parse(read_text(path), path.parent_path());
}

void ServiceConfig::validate() const {
  std::error_code ec;
  if (!fs::is_directory(data_root, ec))
    throw Error(Errc::StartupValidationError, data_root.string() + " is not a directory");
  for (const auto& [level, path] : geometry_paths)
    if (!fs::is_regular_file(path, ec))
      throw Error(Errc::StartupValidationError, path.string() + " does not exist");
  if (palette_overrides && !fs::is_regular_file(*palette_overrides, ec))
    throw Error(Errc::StartupValidationError, palette_overrides->string() + " does not exist");
}

fs::path resolve_config_path(const fs::path& config_path) {
  if (const char* env = std::getenv("ELECTMAP_CONFIG"); env && *env) return env;
  return config_path;
}

const ElectionTable* Snapshot::find(ElectionType type, int year,
                                    std::optional<RegionLevel> level) const {
  const CatalogEntry* entry = level ? catalog.find(type, year, *level) : catalog.find_preferred(type, year);
  if (!entry) return nullptr;
  for (const auto& t : tables)
    if (t.entry == *entry) return &t;
  return nullptr;
}

std::shared_ptr<const Snapshot> load_snapshot(const ServiceConfig& config, std::uint64_t version) {
  config.validate();
  auto snap = std::make_shared<Snapshot>();
  snap->version = version;
  auto at = [](const fs::path& path, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(Errc::StartupValidationError, path.string() + ": " + e.detail());
    }
  };
  snap->catalog = at(config.data_root, [&] { return build_catalog(config.data_root); });
  snap->tables = at(config.data_root, [&] { return load_catalog(snap->catalog); });
  for (const auto& [level, path] : config.geometry_paths) {
    auto features = at(path, [&] { return from_geojson(read_text(path)); });
    if (features.level != level)
      throw Error(Errc::StartupValidationError, path.string() + " holds " +
                                                    std::string(to_string(features.level)) + " ids");
    snap->geometry.emplace(level, std::move(features));
  }
  if (config.palette_overrides) {
    snap->color_overrides = at(*config.palette_overrides,
                               [&] { return load_color_overrides(*config.palette_overrides); });
    at(*config.palette_overrides, [&] { return assign_party_colors({"-"}, snap->color_overrides); });
  }
  return snap;
}

// ---------------------------------------------------------------------------

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string detail;
};

HttpResponse json_response(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump(-1, ' ', false, json::error_handler_t::replace);
  return r;
}

HttpResponse error_response(const HttpError& e) {
  json body{{"error", e.code}};
  if (!e.detail.empty()) body["detail"] = e.detail;
  return json_response(e.status, body);
}

ElectionType type_param(std::string_view value) {
  const auto type = parse_election_type(value);
  if (!type) throw HttpError{400, "bad_request", "unknown election type '" + std::string(value) + "'"};
  return *type;
}

int year_param(std::string_view value) {
  const auto year = text::parse_int(value);
  if (!year || *year < 0 || *year > 9999)
    throw HttpError{400, "bad_request", "bad year '" + std::string(value) + "'"};
  return static_cast<int>(*year);
}

const std::string* query(const HttpRequest& req, const std::string& key) {
  const auto it = req.query.find(key);
  return it == req.query.end() ? nullptr : &it->second;
}

const std::string& required(const HttpRequest& req, const std::string& key) {
  if (const auto* v = query(req, key)) return *v;
  throw HttpError{400, "bad_request", "missing query parameter '" + key + "'"};
}

double double_param(const HttpRequest& req, const std::string& key, double fallback) {
  const auto* v = query(req, key);
  if (!v) return fallback;
  const auto d = text::parse_double(*v);
  if (!d) throw HttpError{400, "bad_request", "bad " + key + " '" + *v + "'"};
  return *d;
}

std::optional<RegionLevel> level_param(const HttpRequest& req) {
  const auto* v = query(req, "level");
  if (!v) return std::nullopt;
  const auto level = parse_region_level(*v);
  if (!level) throw HttpError{400, "bad_request", "bad level '" + *v + "'"};
  return level;
}

const ElectionTable& election(const Snapshot& snap, ElectionType type, int year,
                              std::optional<RegionLevel> level) {
  const auto* table = snap.find(type, year, level);
  if (!table) throw HttpError{404, "not_found", {}};
  return *table;
}

json catalog_json(const Snapshot& snap) {
  json out = json::array();
  for (const auto& e : snap.catalog.entries)
    out.push_back({{"type", to_string(e.type)},
                   {"year", e.year},
                   {"level", to_string(e.level)},
                   {"file", e.path.filename().string()},
                   {"rows", e.row_count}});
  return out;
}

HttpResponse results(const Snapshot& snap, const HttpRequest& req, std::string_view type_s,
                     std::string_view year_s) {
  const auto type = type_param(type_s);
  const int year = year_param(year_s);
  const auto& table = election(snap, type, year, level_param(req));
  json parties = json::array();
  for (const auto& s : election_summary(table.rows)) parties.push_back(to_json(s));
  return json_response(200, {{"type", to_string(type)},
                             {"year", year},
                             {"level", to_string(table.entry.level)},
                             {"parties", parties}});
}

HttpResponse map_svg(const Snapshot& snap, const HttpRequest& req, std::string_view type_s,
                     std::string_view year_s) {
  const auto type = type_param(type_s);
  const int year = year_param(year_s);
  const double retain = double_param(req, "retain", 1.0);
  if (!(retain > 0.0 && retain <= 1.0))
    throw HttpError{400, "bad_request", "retain must lie in (0, 1]"};
  RenderSize size;
  size.width_px = static_cast<int>(double_param(req, "width", size.width_px));
  size.height_px = static_cast<int>(double_param(req, "height", size.height_px));
  if (size.width_px < 64 || size.height_px < 64 || size.width_px > 16384 || size.height_px > 16384)
    throw HttpError{400, "bad_request", "width/height must lie in [64, 16384]"};

  const auto& table = election(snap, type, year, level_param(req));
  const auto geom = snap.geometry.find(table.entry.level);
  if (geom == snap.geometry.end())
    throw HttpError{404, "not_found", "no geometry for " + std::string(to_string(table.entry.level))};
  const FeatureSet features = retain < 1.0 ? simplify(geom->second, retain) : geom->second;
  auto joined = merge_results_with_geometry(table.rows, table.entry.level, features, false);

  HttpResponse r;
  r.content_type = "image/svg+xml";
  std::vector<RegionFeature> unmatched;
  for (RegionId id : joined.report.unmatched_geometry_ids) unmatched.push_back(*features.find(id));
  if (joined.regions.empty()) {
    r.body = render_outline(features, size);
  } else {
    std::vector<std::string> parties;
    for (const auto& region : joined.regions) parties.push_back(region.winner_party);
    const auto palette = assign_party_colors(parties, snap.color_overrides);
    r.body = render_choropleth(joined.regions, palette, size, unmatched);
  }
  std::string ids;
  for (RegionId id : joined.report.unmatched_geometry_ids) ids += (ids.empty() ? "" : ",") + std::to_string(id);
  r.headers["X-Join-Unmatched"] = ids;
  return r;
}

HttpResponse trend(const Snapshot& snap, const HttpRequest& req) {
  const auto type = type_param(required(req, "type"));
  std::optional<double> at;
  if (query(req, "predict")) at = double_param(req, "predict", 0);
  CandidateTrend t;
  try {
    t = candidate_trend(snap.tables, type);
  } catch (const Error& e) {
    if (e.code() == Errc::InsufficientData) throw HttpError{404, "insufficient_data", e.detail()};
    throw;
  }
  json body = to_json(t);
  body["type"] = to_string(type);
  body["prediction"] = at ? json{{"x", *at}, {"y", predict(t.model, *at)}} : json(nullptr);
  return json_response(200, body);
}

HttpResponse heatmap(const Snapshot& snap, const HttpRequest& req) {
  const auto type = type_param(required(req, "type"));
  json body = to_json(winner_heatmap(snap.tables, type));
  body["type"] = to_string(type);
  return json_response(200, body);
}

HttpResponse series(const Snapshot& snap, const HttpRequest& req) {
  const auto type = type_param(required(req, "type"));
  const auto& metric_s = required(req, "metric");
  const auto metric = parse_metric(metric_s);
  if (!metric) throw HttpError{400, "bad_request", "unknown metric '" + metric_s + "'"};
  std::vector<PartySeries> all;
  try {
    all = party_metric_series(snap.tables, type, *metric);
  } catch (const Error& e) {
    if (e.code() == Errc::InsufficientData) throw HttpError{404, "insufficient_data", e.detail()};
    throw;
  }
  json list = json::array();
  for (const auto& s : all) list.push_back(to_json(s));
  return json_response(200, {{"type", to_string(type)}, {"metric", to_string(*metric)}, {"series", list}});
}

HttpResponse route(const Snapshot& snap, const HttpRequest& req) {
  if (req.method != "GET") throw HttpError{405, "method_not_allowed", {}};
  const auto parts = text::split(req.path, '/');
  // parts[0] is the empty segment before the leading slash.
  auto seg = [&](std::size_t i) -> std::string_view { return i < parts.size() ? parts[i] : ""; };
  if (parts.size() < 3 || !seg(0).empty() || seg(1) != "api") throw HttpError{404, "not_found", {}};

  if (seg(2) == "elections") {
    if (parts.size() == 3) return json_response(200, catalog_json(snap));
    if (parts.size() == 6 && seg(5) == "results") return results(snap, req, seg(3), seg(4));
  } else if (seg(2) == "maps" && parts.size() == 5 && seg(4).ends_with(".svg")) {
    auto year = seg(4);
    year.remove_suffix(4);
    return map_svg(snap, req, seg(3), year);
  } else if (seg(2) == "analytics") {
    if (parts.size() == 5 && seg(3) == "candidates" && seg(4) == "trend") return trend(snap, req);
    if (parts.size() == 4 && seg(3) == "heatmap") return heatmap(snap, req);
    if (parts.size() == 4 && seg(3) == "series") return series(snap, req);
  }
  throw HttpError{404, "not_found", {}};
}

} // namespace

HttpResponse handle_request(const Snapshot& snapshot, const HttpRequest& request) {
  HttpResponse response;
  try {
    response = route(snapshot, request);
  } catch (const HttpError& e) {
    response = error_response(e);
  } catch (const Error& e) {
    response = error_response({422, "unprocessable", e.detail()});
  }
  const std::string etag = "\"v" + std::to_string(snapshot.version) + "\"";
  if (response.status == 200) {
    response.headers["ETag"] = etag;
    response.headers["Cache-Control"] = "no-cache";
    if (request.if_none_match == etag) {
      response.status = 304;
      response.body.clear();
    }
  }
  response.headers["X-Snapshot-Version"] = std::to_string(snapshot.version);
  return response;
}

} // namespace electmap
