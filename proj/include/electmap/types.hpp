#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace electmap {

enum class ElectionType { Federal, Provincial };

// Province rows key on PRUID, census-division rows on CDUID.
enum class RegionLevel { Province, CensusDivision };

using RegionId = std::int64_t;

struct ElectionResultRow {
  RegionId region_id = 0;
  std::string region_name;
  std::string party;
  std::optional<std::int64_t> votes;
  std::optional<double> vote_share_pct;
  std::optional<std::int64_t> seats;
  std::optional<double> seat_share_pct;
  std::optional<std::int64_t> candidates;
  bool is_winner = false;

  friend bool operator==(const ElectionResultRow&, const ElectionResultRow&) = default;
};

std::string_view to_string(ElectionType type) noexcept;
std::string_view to_string(RegionLevel level) noexcept;

// Case-insensitive; accepts "federal"/"provincial".
std::optional<ElectionType> parse_election_type(std::string_view text) noexcept;
// Accepts "province", "cd", "census_division".
std::optional<RegionLevel> parse_region_level(std::string_view text) noexcept;

} // namespace electmap
