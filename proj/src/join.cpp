#include "electmap/diagnostics.hpp"
#include "electmap/join.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <regex>

namespace electmap {

std::string JoinReport::to_json() const {
  nlohmann::json j{{"matched", matched},
                   {"unmatched_geometry_ids", unmatched_geometry_ids},
                   {"unmatched_result_ids", unmatched_result_ids},
                   {"warnings", warnings}};
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
}

StrictJoinError::StrictJoinError(JoinReport report)
    : Error(Errc::StrictJoinFailure,
            std::to_string(report.unmatched_geometry_ids.size()) + " unmatched geometry ids, " +
                std::to_string(report.unmatched_result_ids.size()) + " unmatched result ids"),
      report_(std::move(report)) {}

const ElectionResultRow& pick_winner(std::span<const ElectionResultRow* const> rows, bool* tied) {
  auto better = [](const ElectionResultRow& a, const ElectionResultRow& b) {
    if (a.is_winner != b.is_winner) return a.is_winner;
    const auto sa = a.seats.value_or(-1), sb = b.seats.value_or(-1);
    if (sa != sb) return sa > sb;
    const auto va = a.votes.value_or(-1), vb = b.votes.value_or(-1);
    if (va != vb) return va > vb;
    return a.party < b.party;
  };
  const ElectionResultRow* best = rows.front();
  for (const auto* row : rows.subspan(1))
    if (better(*row, *best)) best = row;
  if (tied) {
    *tied = std::any_of(rows.begin(), rows.end(), [&](const ElectionResultRow* r) {
      return r != best && r->party != best->party && r->is_winner == best->is_winner &&
             r->seats.value_or(-1) == best->seats.value_or(-1) &&
             r->votes.value_or(-1) == best->votes.value_or(-1);
    });
  }
  return *best;
}

JoinResult merge_results_with_geometry(std::span<const ElectionResultRow> rows,
                                       RegionLevel rows_level, const FeatureSet& features,
                                       bool strict) {
  if (rows_level != features.level)
    throw Error(Errc::LevelMismatch, std::string("results are ") + std::string(to_string(rows_level)) +
                                         " level, geometry is " +
                                         std::string(to_string(features.level)));
  std::map<RegionId, std::vector<const ElectionResultRow*>> by_region;
  for (const auto& row : rows) by_region[row.region_id].push_back(&row);

  JoinResult result;
  std::map<RegionId, bool> used;
  for (const auto& feature : features.features) {
    const auto it = by_region.find(feature.region_id);
    if (it == by_region.end()) {
      result.report.unmatched_geometry_ids.push_back(feature.region_id);
      continue;
    }
    used[feature.region_id] = true;
    bool tied = false;
    const auto& winner = pick_winner(it->second, &tied);
    if (tied) {
      const std::string msg = "region " + std::to_string(feature.region_id) +
                              ": tied winning rows, chose '" + winner.party + "'";
      result.report.warnings.push_back(msg);
      warn(msg);
    }
    result.regions.push_back({feature, winner.party, winner});
    ++result.report.matched;
  }
  for (const auto& [id, region_rows] : by_region)
    if (!used.contains(id)) result.report.unmatched_result_ids.push_back(id);
  std::sort(result.report.unmatched_geometry_ids.begin(), result.report.unmatched_geometry_ids.end());

  if (strict && !result.report.complete()) throw StrictJoinError(result.report);
  return result;
}

std::string normalize_region_name(std::string_view name) {
  std::string s = text::collapse_whitespace(name);
  if (const auto slash = s.find('/'); slash != std::string::npos) s.erase(slash);
  // Trailing "(Apr 16, '19)"-style election date.
  static const std::regex date_suffix(R"(\s*\([A-Za-z]{3,9}\.? \d{1,2}, ?'?\d{2,4}\)\s*$)");
  s = std::regex_replace(s, date_suffix, "");
  return text::collapse_whitespace(s);
}

} // namespace electmap
