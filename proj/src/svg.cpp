#include "electmap/error.hpp"
#include "electmap/render.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace electmap {

namespace {

constexpr int kLegendRow = 20;
constexpr int kSwatch = 12;

std::string num(double v) { return text::format_fixed(v, 6); }

struct MapFrame {
  double x = 0, y = 0, w = 1, h = 1; // viewBox in flipped map units
};

MapFrame frame_for(const BBox& box) {
  double w = box.xmax - box.xmin;
  double h = box.ymax - box.ymin;
  double mx = 0.02 * w;
  double my = 0.02 * h;
  if (w <= 0) mx = 0.02 * (h > 0 ? h : 1.0);
  if (h <= 0) my = 0.02 * (w > 0 ? w : 1.0);
  return {box.xmin - mx, -(box.ymax + my), w + 2 * mx, h + 2 * my};
}

std::string path_data(const RegionFeature& feature) {
  std::string d;
  for (const auto& polygon : feature.polygons) {
    for (const auto& ring : polygon) {
      // The closing vertex is implied by Z.
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (!d.empty()) d.push_back(' ');
        d += i == 0 ? "M" : "L";
        d += num(ring[i].x);
        d.push_back(' ');
        d += num(-ring[i].y);
      }
      d += " Z";
    }
  }
  return d;
}

void open_document(std::string& out, RenderSize size) {
  const auto w = std::to_string(size.width_px);
  const auto h = std::to_string(size.height_px);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w + "\" height=\"" +
         h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h +
         "\" fill=\"#ffffff\"/>\n";
}

void open_map(std::string& out, const BBox& box, int map_width, int height) {
  const MapFrame f = frame_for(box);
  out += "<svg class=\"map\" x=\"0\" y=\"0\" width=\"" + std::to_string(map_width) + "\" height=\"" +
         std::to_string(height) + "\" viewBox=\"" + num(f.x) + " " + num(f.y) + " " + num(f.w) +
         " " + num(f.h) + "\" preserveAspectRatio=\"xMidYMid meet\">\n";
}

void append_region(std::string& out, const RegionFeature& feature, std::string_view fill,
                   const std::string* winner) {
  out += "<path class=\"region\" data-region-id=\"" + std::to_string(feature.region_id) + "\"";
  out += " data-region-name=\"" + text::xml_escape(feature.region_name) + "\"";
  if (winner) out += " data-winner=\"" + text::xml_escape(*winner) + "\"";
  out += " fill=\"";
  out += fill;
  out += "\" fill-rule=\"evenodd\" stroke=\"#ffffff\" stroke-width=\"1\" "
         "vector-effect=\"non-scaling-stroke\" d=\"" +
         path_data(feature) + "\"/>\n";
}

void check_size(RenderSize size) {
  if (size.width_px < 64 || size.height_px < 64)
    throw Error(Errc::InvalidArgument, "map size must be at least 64x64 pixels");
}

} // namespace

std::string render_choropleth(std::span<const JoinedRegion> regions, const Palette& palette,
                              RenderSize size, std::span<const RegionFeature> unmatched) {
  if (regions.empty()) throw Error(Errc::EmptyInput, "no joined regions to render");
  check_size(size);

  BBox box = regions.front().feature.bbox;
  for (const auto& r : regions) box = box.united(r.feature.bbox);
  for (const auto& f : unmatched) box = box.united(f.bbox);

  std::vector<std::string> parties;
  for (const auto& r : regions) parties.push_back(r.winner_party);
  std::sort(parties.begin(), parties.end(), text::iless);
  parties.erase(std::unique(parties.begin(), parties.end()), parties.end());

  const int legend_width = std::clamp(size.width_px * 3 / 10, 48, 320);
  const int map_width = size.width_px - legend_width;

  std::string out;
  open_document(out, size);
  open_map(out, box, map_width, size.height_px);
  for (const auto& f : unmatched) append_region(out, f, kNeutralGray, nullptr);
  for (const auto& r : regions)
    append_region(out, r.feature, palette.color_of(r.winner_party), &r.winner_party);
  out += "</svg>\n";

  out += "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const int y = 12 + static_cast<int>(i) * kLegendRow;
    const int x = map_width + 8;
    const std::string name = text::xml_escape(parties[i]);
    out += "<g class=\"legend-entry\" data-party=\"" + name + "\">";
    out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(kSwatch) + "\" height=\"" + std::to_string(kSwatch) + "\" fill=\"" +
           palette.color_of(parties[i]) + "\"/>";
    out += "<text x=\"" + std::to_string(x + kSwatch + 6) + "\" y=\"" +
           std::to_string(y + kSwatch - 2) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
           name + "</text></g>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string render_outline(const FeatureSet& features, RenderSize size) {
  if (features.features.empty()) throw Error(Errc::EmptyInput, "no features to render");
  check_size(size);
  std::string out;
  open_document(out, size);
  open_map(out, compute_bbox(features), size.width_px, size.height_px);
  for (const auto& f : features.features) append_region(out, f, kNeutralGray, nullptr);
  out += "</svg>\n</svg>\n";
  return out;
}

} // namespace electmap
