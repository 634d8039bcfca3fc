#pragma once

#include "electmap/geometry.hpp"
#include "electmap/join.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace electmap {

// 20-color categorical cycle used for parties without an override.
std::span<const std::string_view> categorical_cycle() noexcept;

inline constexpr std::string_view kNeutralGray = "#d0d0d0";

bool is_hex_color(std::string_view color) noexcept;

struct Palette {
  std::map<std::string, std::string> assignments; // party -> #rrggbb
  std::map<std::string, std::string> overrides;

  // Throws Errc::InvalidArgument for a party without a color.
  const std::string& color_of(const std::string& party) const;
};

// Parties are deduplicated and ordered case-insensitively before colors are
// handed out, so the result does not depend on input order. Overrides apply
// to listed parties only and must use distinct colors.
Palette assign_party_colors(const std::vector<std::string>& parties,
                            const std::map<std::string, std::string>& overrides = {});

// JSON object mapping party name to "#rrggbb".
std::map<std::string, std::string> parse_color_overrides(std::string_view json_text);
std::map<std::string, std::string> load_color_overrides(const std::filesystem::path& path);

struct RenderSize {
  int width_px = 960;
  int height_px = 600;
};

// Standalone SVG 1.1. The map is a nested <svg> whose viewBox is the union
// bbox plus a 2% margin with y negated (north up); the legend lists winner
// parties alphabetically. `unmatched` features are drawn neutral gray.
std::string render_choropleth(std::span<const JoinedRegion> regions, const Palette& palette,
                              RenderSize size = {},
                              std::span<const RegionFeature> unmatched = {});

// Every region in neutral gray, no legend.
std::string render_outline(const FeatureSet& features, RenderSize size = {});

} // namespace electmap
