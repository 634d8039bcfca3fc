#include "electmap/error.hpp"
#include "electmap/render.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace electmap {

namespace {

constexpr std::array<std::string_view, 20> kCycle{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
    "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};

struct Rgb {
  int r, g, b;
};

Rgb parse_rgb(std::string_view hex) {
  auto channel = [&](std::size_t at) { return std::stoi(std::string(hex.substr(at, 2)), nullptr, 16); };
  return {channel(1), channel(3), channel(5)};
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", std::clamp(c.r, 0, 255), std::clamp(c.g, 0, 255),
                std::clamp(c.b, 0, 255));
  return buf;
}

// Lap k >= 1 of the cycle: odd laps lighten toward white, even laps darken.
std::string shifted(std::string_view base, std::size_t lap) {
  const Rgb c = parse_rgb(base);
  const double amount = std::min(0.85, 0.3 * static_cast<double>((lap + 1) / 2));
  auto mix = [&](int v) {
    const double target = lap % 2 == 1 ? 255.0 : 0.0;
    return static_cast<int>(std::lround(v + (target - v) * amount));
  };
  return to_hex({mix(c.r), mix(c.g), mix(c.b)});
}

std::string next_free(std::string color, const std::set<std::string>& used) {
  // Nudge blue then green channel until unused.
  Rgb c = parse_rgb(color);
  int step = 0;
  while (used.contains(color)) {
    ++step;
    c.b = (c.b + 7) % 256;
    if (step % 37 == 0) c.g = (c.g + 11) % 256;
    color = to_hex(c);
  }
  return color;
}

} // namespace

std::span<const std::string_view> categorical_cycle() noexcept { return kCycle; }

bool is_hex_color(std::string_view color) noexcept {
  if (color.size() != 7 || color[0] != '#') return false;
  return std::all_of(color.begin() + 1, color.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  });
}

const std::string& Palette::color_of(const std::string& party) const {
  const auto it = assignments.find(party);
  if (it == assignments.end()) throw Error(Errc::InvalidArgument, "no color for party '" + party + "'");
  return it->second;
}

Palette assign_party_colors(const std::vector<std::string>& parties,
                            const std::map<std::string, std::string>& overrides) {
  std::vector<std::string> ordered = parties;
  std::sort(ordered.begin(), ordered.end(), text::iless);
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  if (ordered.empty()) throw Error(Errc::EmptyInput, "no parties to color");

  Palette palette;
  std::set<std::string> used;
  std::map<std::string, std::string> color_owner;
  for (const auto& [party, raw] : overrides) {
    if (!is_hex_color(raw)) throw Error(Errc::InvalidColor, party + ": '" + raw + "'");
    const std::string color = text::to_lower(raw);
    if (auto [it, inserted] = color_owner.emplace(color, party); !inserted)
      throw Error(Errc::DuplicateOverrideColor,
                  "'" + it->second + "' and '" + party + "' both use " + color);
  }
  for (const auto& party : ordered) {
    if (const auto it = overrides.find(party); it != overrides.end()) {
      const std::string color = text::to_lower(it->second);
      palette.overrides[party] = color;
      palette.assignments[party] = color;
      used.insert(color);
    }
  }
  std::size_t slot = 0;
  for (const auto& party : ordered) {
    if (palette.assignments.contains(party)) continue;
    const std::size_t lap = slot / kCycle.size();
    const auto base = kCycle[slot % kCycle.size()];
    std::string color = lap == 0 ? std::string(base) : shifted(base, lap);
    color = next_free(std::move(color), used);
    used.insert(color);
    palette.assignments[party] = color;
    ++slot;
  }
  return palette;
}

std::map<std::string, std::string> parse_color_overrides(std::string_view json_text) {
  std::map<std::string, std::string> out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_object()) throw Error(Errc::ConfigError, "color overrides must be a JSON object");
    for (const auto& [party, color] : doc.items()) {
      if (!color.is_string()) throw Error(Errc::InvalidColor, party + ": not a string");
      const auto value = color.get<std::string>();
      if (!is_hex_color(value)) throw Error(Errc::InvalidColor, party + ": '" + value + "'");
      out[party] = text::to_lower(value);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("color overrides: ") + e.what());
  }
  return out;
}

std::map<std::string, std::string> load_color_overrides(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_color_overrides(ss.str());
}

} // namespace electmap
