#include "electmap/error.hpp"
#include "electmap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace electmap {

BBox BBox::united(const BBox& other) const noexcept {
  return {std::min(xmin, other.xmin), std::min(ymin, other.ymin), std::max(xmax, other.xmax),
          std::max(ymax, other.ymax)};
}

std::size_t RegionFeature::vertex_count() const noexcept {
  std::size_t n = 0;
  for (const auto& polygon : polygons)
    for (const auto& ring : polygon) n += ring.size();
  return n;
}

const RegionFeature* FeatureSet::find(RegionId id) const noexcept {
  for (const auto& f : features)
    if (f.region_id == id) return &f;
  return nullptr;
}

std::size_t FeatureSet::vertex_count() const noexcept {
  std::size_t n = 0;
  for (const auto& f : features) n += f.vertex_count();
  return n;
}

double signed_area(const Ring& ring) noexcept {
  double twice = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  return twice / 2;
}

double triangle_area(const Point& a, const Point& b, const Point& c) noexcept {
  return std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) / 2;
}

bool point_in_ring(const Point& p, const Ring& ring) noexcept {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

bool is_closed(const Ring& ring) noexcept { return ring.size() >= 4 && ring.front() == ring.back(); }

BBox compute_bbox(const RegionFeature& feature) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BBox box{inf, inf, -inf, -inf};
  bool any = false;
  for (const auto& polygon : feature.polygons)
    for (const auto& ring : polygon)
      for (const auto& p : ring) {
        box.xmin = std::min(box.xmin, p.x);
        box.ymin = std::min(box.ymin, p.y);
        box.xmax = std::max(box.xmax, p.x);
        box.ymax = std::max(box.ymax, p.y);
        any = true;
      }
  if (!any) throw Error(Errc::EmptyInput, "feature " + std::to_string(feature.region_id) + " has no points");
  return box;
}

BBox compute_bbox(const FeatureSet& features) {
  if (features.features.empty()) throw Error(Errc::EmptyInput, "feature set is empty");
  BBox box = features.features.front().bbox;
  for (const auto& f : features.features) box = box.united(f.bbox);
  return box;
}

std::vector<Polygon> group_rings(std::vector<Ring> rings) {
  std::vector<Polygon> polygons;
  for (auto& ring : rings) {
    const bool ccw = signed_area(ring) >= 0;
    auto host = std::find_if(polygons.begin(), polygons.end(), [&](const Polygon& p) {
      return (signed_area(p.front()) >= 0) != ccw && point_in_ring(ring.front(), p.front());
    });
    if (host != polygons.end())
      host->push_back(std::move(ring));
    else
      polygons.push_back(Polygon{std::move(ring)});
  }
  return polygons;
}

std::string_view id_property(RegionLevel level) noexcept {
  return level == RegionLevel::Province ? "PRUID" : "CDUID";
}

std::string_view name_property(RegionLevel level) noexcept {
  return level == RegionLevel::Province ? "PRNAME" : "CDNAME";
}

} // namespace electmap
