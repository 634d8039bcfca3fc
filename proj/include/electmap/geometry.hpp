#pragma once

#include "electmap/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace electmap {

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Closed: front() == back(), at least 4 points.
using Ring = std::vector<Point>;

// First ring is the outer boundary, the rest are holes.
using Polygon = std::vector<Ring>;

struct BBox {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  friend bool operator==(const BBox&, const BBox&) = default;

  bool contains(const Point& p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  BBox united(const BBox& other) const noexcept;
};

struct RegionFeature {
  RegionId region_id = 0;
  std::string region_name;
  // One entry for a simple polygon, several for a multi-part region.
  std::vector<Polygon> polygons;
  BBox bbox;

  friend bool operator==(const RegionFeature&, const RegionFeature&) = default;

  std::size_t vertex_count() const noexcept;
};

struct FeatureSet {
  std::vector<RegionFeature> features;
  RegionLevel level = RegionLevel::Province;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

  const RegionFeature* find(RegionId id) const noexcept;
  std::size_t vertex_count() const noexcept;
};

// Shoelace sum; negative for clockwise rings.
double signed_area(const Ring& ring) noexcept;
double triangle_area(const Point& a, const Point& b, const Point& c) noexcept;
bool point_in_ring(const Point& p, const Ring& ring) noexcept;
// Throws Errc::EmptyInput when there are no points.
BBox compute_bbox(const RegionFeature& feature);
BBox compute_bbox(const FeatureSet& features);
bool is_closed(const Ring& ring) noexcept;

// Groups ESRI parts into polygons. A ring wound opposite to an earlier outer
// ring that contains its first vertex is a hole of that polygon; every other
// ring opens a new polygon. Works for both ESRI (CW outer) and RFC-7946 (CCW
// outer) winding.
std::vector<Polygon> group_rings(std::vector<Ring> rings);

// Polygon (type 5) shapefile plus its dBASE table. `id_field` PRID is read as
// PRUID; CDUID selects census-division level.
FeatureSet parse_shapefile(std::span<const std::uint8_t> shp, std::span<const std::uint8_t> dbf,
                           std::string_view id_field, std::string_view name_field);

// Visvalingam-Whyatt per ring: keep max(3, ceil(retain * n)) of the n distinct
// vertices, always dropping the smallest current triangle (ties to the lowest
// original index).
FeatureSet simplify(const FeatureSet& features, double retain);
Ring simplify_ring(const Ring& ring, double retain);

std::string to_geojson(const FeatureSet& features);
FeatureSet from_geojson(std::string_view json_text);

// Property keys used for a level: PRUID/PRNAME or CDUID/CDNAME.
std::string_view id_property(RegionLevel level) noexcept;
std::string_view name_property(RegionLevel level) noexcept;

} // namespace electmap
