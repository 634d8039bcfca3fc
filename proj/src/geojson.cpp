#include "electmap/error.hpp"
#include "electmap/geometry.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <set>

namespace electmap {

namespace {

using nlohmann::json;

std::string json_string(const std::string& s) {
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

void append_ring(std::string& out, const Ring& ring) {
  out.push_back('[');
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back('[');
    out += text::format_fixed(ring[i].x, 6);
    out.push_back(',');
    out += text::format_fixed(ring[i].y, 6);
    out.push_back(']');
  }
  out.push_back(']');
}

void append_polygon(std::string& out, const Polygon& polygon) {
  out.push_back('[');
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    if (i) out.push_back(',');
    append_ring(out, polygon[i]);
  }
  out.push_back(']');
}

} // namespace

std::string to_geojson(const FeatureSet& features) {
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < features.features.size(); ++i) {
    const auto& f = features.features[i];
    out += i ? ",\n" : "\n";
    out += "{\"type\":\"Feature\",\"properties\":{\"";
    out += id_property(features.level);
    out += "\":" + std::to_string(f.region_id) + ",\"";
    out += name_property(features.level);
    out += "\":" + json_string(f.region_name) + "},\"geometry\":";
    if (f.polygons.size() == 1) {
      out += "{\"type\":\"Polygon\",\"coordinates\":";
      append_polygon(out, f.polygons.front());
    } else {
      out += "{\"type\":\"MultiPolygon\",\"coordinates\":[";
      for (std::size_t p = 0; p < f.polygons.size(); ++p) {
        if (p) out.push_back(',');
        append_polygon(out, f.polygons[p]);
      }
      out.push_back(']');
    }
    out += "}}";
  }
  out += "\n]}\n";
  return out;
}

namespace {

const json* find_property(const json& props, std::initializer_list<std::string_view> keys) {
  for (auto key : keys)
    for (auto it = props.begin(); it != props.end(); ++it)
      if (text::iequals(it.key(), key)) return &it.value();
  return nullptr;
}

RegionId id_value(const json& v, std::size_t index) {
  if (v.is_number_integer() && v.get<std::int64_t>() > 0) return v.get<std::int64_t>();
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0 &&
      v.get<std::uint64_t>() < (1ull << 62))
    return static_cast<RegionId>(v.get<std::uint64_t>());
  if (v.is_string()) {
    if (auto id = text::parse_int(v.get<std::string>()); id && *id > 0) return *id;
  }
  throw Error(Errc::MissingIdProperty,
              "feature " + std::to_string(index) + " has a non-numeric or non-positive id");
}

Ring parse_ring(const json& coords) {
  if (!coords.is_array()) throw Error(Errc::JsonMalformed, "ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
      throw Error(Errc::JsonMalformed, "bad position");
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  if (!is_closed(ring)) throw Error(Errc::JsonMalformed, "ring not closed or shorter than 4");
  return ring;
}

Polygon parse_polygon(const json& coords) {
  if (!coords.is_array() || coords.empty())
    throw Error(Errc::JsonMalformed, "polygon has no rings");
  Polygon polygon;
  for (const auto& ring : coords) polygon.push_back(parse_ring(ring));
  return polygon;
}

} // namespace

FeatureSet from_geojson(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::JsonMalformed, e.what());
  }
  if (!doc.is_object() || doc.value("type", std::string()) != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    throw Error(Errc::JsonMalformed, "expected a FeatureCollection");

  FeatureSet out;
  std::optional<RegionLevel> level;
  std::set<RegionId> seen;
  std::size_t index = 0;
  for (const auto& feature : doc["features"]) {
    if (!feature.is_object()) throw Error(Errc::JsonMalformed, "feature is not an object");
    const auto props_it = feature.find("properties");
    if (props_it == feature.end() || !props_it->is_object())
      throw Error(Errc::MissingIdProperty, "feature " + std::to_string(index) + " has no properties");
    const json& props = *props_it;

    RegionLevel feature_level = RegionLevel::Province;
    const json* id = find_property(props, {"PRUID", "PRID"});
    if (!id) {
      id = find_property(props, {"CDUID"});
      feature_level = RegionLevel::CensusDivision;
    }
    if (!id) throw Error(Errc::MissingIdProperty, "feature " + std::to_string(index));
    if (level && *level != feature_level)
      throw Error(Errc::JsonMalformed, "features mix PRUID and CDUID keys");
    level = feature_level;

    RegionFeature f;
    f.region_id = id_value(*id, index);
    if (!seen.insert(f.region_id).second)
      throw Error(Errc::DuplicateRegionId, std::to_string(f.region_id));
    if (const json* name = find_property(props, {name_property(feature_level), "name"});
        name && name->is_string())
      f.region_name = name->get<std::string>();

    const auto geom_it = feature.find("geometry");
    if (geom_it == feature.end() || !geom_it->is_object())
      throw Error(Errc::JsonMalformed, "feature " + std::to_string(index) + " has no geometry");
    const std::string type = geom_it->value("type", std::string());
    const auto coords = geom_it->find("coordinates");
    if (coords == geom_it->end()) throw Error(Errc::JsonMalformed, "geometry has no coordinates");
    if (type == "Polygon") {
      f.polygons.push_back(parse_polygon(*coords));
    } else if (type == "MultiPolygon") {
      if (!coords->is_array() || coords->empty())
        throw Error(Errc::JsonMalformed, "empty MultiPolygon");
      for (const auto& polygon : *coords) f.polygons.push_back(parse_polygon(polygon));
    } else {
      throw Error(Errc::JsonMalformed, "unsupported geometry type '" + type + "'");
    }
    f.bbox = compute_bbox(f);
    out.features.push_back(std::move(f));
    ++index;
  }
  out.level = level.value_or(RegionLevel::Province);
  return out;
}

} // namespace electmap
