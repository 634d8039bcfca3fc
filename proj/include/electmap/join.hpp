#pragma once

#include "electmap/error.hpp"
#include "electmap/geometry.hpp"
#include "electmap/types.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace electmap {

struct JoinedRegion {
  RegionFeature feature;
  std::string winner_party;
  // The row that won the region; its optional numbers are the region metrics.
  ElectionResultRow winner;
};

struct JoinReport {
  std::size_t matched = 0;
  std::vector<RegionId> unmatched_geometry_ids;
  std::vector<RegionId> unmatched_result_ids;
  std::vector<std::string> warnings;

  friend bool operator==(const JoinReport&, const JoinReport&) = default;

  bool complete() const noexcept {
    return unmatched_geometry_ids.empty() && unmatched_result_ids.empty();
  }
  std::string to_json() const;
};

class StrictJoinError : public Error {
public:
  explicit StrictJoinError(JoinReport report);
  const JoinReport& report() const noexcept { return report_; }

private:
  JoinReport report_;
};

struct JoinResult {
  std::vector<JoinedRegion> regions;
  JoinReport report;
};

// Winning row among rows of one region: is_winner, then most seats, then most
// votes; remaining ties go to the lexicographically smallest party. Sets
// `tied` when the last rule decided. `rows` must be non-empty.
const ElectionResultRow& pick_winner(std::span<const ElectionResultRow* const> rows, bool* tied = nullptr);

// Joins on region_id only. Regions come out in feature order; unmatched id
// lists are ascending.
JoinResult merge_results_with_geometry(std::span<const ElectionResultRow> rows,
                                       RegionLevel rows_level, const FeatureSet& features,
                                       bool strict);

// Diagnostics only, never a join key: trims, collapses whitespace, drops a
// "/alternate" bilingual suffix and a trailing parenthesized date.
std::string normalize_region_name(std::string_view name);

} // namespace electmap
