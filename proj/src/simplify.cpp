#include "electmap/error.hpp"
#include "electmap/geometry.hpp"

#include <cmath>
#include <set>
#include <utility>

namespace electmap {

namespace {

std::size_t target_count(double retain, std::size_t distinct) {
  // The epsilon keeps products such as 0.7 * 10 from rounding up a whole vertex.
  const auto wanted = static_cast<std::size_t>(std::ceil(retain * static_cast<double>(distinct) - 1e-9));
  return std::max<std::size_t>(3, wanted);
}

void check_retain(double retain) {
  if (!(retain > 0.0 && retain <= 1.0))
    throw Error(Errc::InvalidArgument, "retain must lie in (0, 1]");
}

} // namespace

Ring simplify_ring(const Ring& ring, double retain) {
  check_retain(retain);
  if (ring.size() < 4) return ring;
  const std::size_t n = ring.size() - 1; // distinct vertices; last repeats the first
  const std::size_t keep = target_count(retain, n);
  if (keep >= n) return ring;

  std::vector<std::size_t> prev(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  std::vector<double> area(n);
  std::set<std::pair<double, std::size_t>> queue;
  for (std::size_t i = 0; i < n; ++i) {
    area[i] = triangle_area(ring[prev[i]], ring[i], ring[next[i]]);
    queue.emplace(area[i], i);
  }
  std::vector<bool> removed(n, false);
  for (std::size_t remaining = n; remaining > keep; --remaining) {
    const auto [a, v] = *queue.begin();
    queue.erase(queue.begin());
    removed[v] = true;
    const std::size_t p = prev[v];
    const std::size_t q = next[v];
    next[p] = q;
    prev[q] = p;
    for (std::size_t u : {p, q}) {
      queue.erase({area[u], u});
      area[u] = triangle_area(ring[prev[u]], ring[u], ring[next[u]]);
      queue.emplace(area[u], u);
    }
  }

  Ring out;
  out.reserve(keep + 1);
  for (std::size_t i = 0; i < n; ++i)
    if (!removed[i]) out.push_back(ring[i]);
  out.push_back(out.front());
  return out;
}

FeatureSet simplify(const FeatureSet& features, double retain) {
  check_retain(retain);
  FeatureSet out;
  out.level = features.level;
  out.features.reserve(features.features.size());
  for (const auto& feature : features.features) {
    RegionFeature f;
    f.region_id = feature.region_id;
    f.region_name = feature.region_name;
    for (const auto& polygon : feature.polygons) {
      Polygon simplified;
      simplified.reserve(polygon.size());
      for (const auto& ring : polygon) simplified.push_back(simplify_ring(ring, retain));
      f.polygons.push_back(std::move(simplified));
    }
    f.bbox = retain == 1.0 ? feature.bbox : compute_bbox(f);
    out.features.push_back(std::move(f));
  }
  return out;
}

} // namespace electmap
