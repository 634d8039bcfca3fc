#pragma once

#include "electmap/datastore.hpp"
#include "electmap/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace electmap {

struct DataPoint {
  double x = 0;
  double y = 0;
};

struct TrendModel {
  double slope = 0;
  double intercept = 0;
  std::size_t n = 0;
  double mean_y = 0;
  double median_y = 0;
  double r2 = 0;
};

// Ordinary least squares on x centered at its mean. Median of an even sample
// is the mean of the two middle values; r2 is 1 when y is constant.
TrendModel fit_ols(std::span<const DataPoint> points);

inline double predict(const TrendModel& model, double x) noexcept {
  return model.intercept + model.slope * x;
}

// ---------------------------------------------------------------------------

struct PartySummary {
  std::string party;
  std::optional<std::int64_t> votes;
  std::optional<double> vote_share_pct;
  std::int64_t seats = 0;
  std::optional<double> seat_share_pct;
  std::int64_t candidates = 0;
  bool candidates_estimated = false;

  friend bool operator==(const PartySummary&, const PartySummary&) = default;
};

// Aggregates one election by party, sorted by seats desc, votes desc, name.
// A row without a seat count contributes one seat when it wins its region.
// Shares come from the row when a party has a single row that carries one,
// otherwise they are recomputed from totals.
std::vector<PartySummary> election_summary(std::span<const ElectionResultRow> rows);

// One table per year for `type` (province level preferred), by ascending year.
std::vector<const ElectionTable*> elections_of(std::span<const ElectionTable> tables,
                                               ElectionType type);

struct CandidatePoint {
  int year = 0;
  double total = 0;
  bool estimated = false;
};

struct CandidateTrend {
  std::vector<CandidatePoint> series;
  TrendModel model;
};

// Totals sum row candidate counts; a row without one counts as one candidate
// per distinct (party, region), and flags the point as estimated.
CandidateTrend candidate_trend(std::span<const ElectionTable> tables, ElectionType type);
CandidateTrend candidate_trend(const ElectionCatalog& catalog, ElectionType type);

struct WinnerMatrix {
  std::vector<std::string> parties; // by wins desc, then name
  std::vector<int> years;
  std::vector<std::vector<int>> wins; // wins[party][year] in {0,1}
};

// The national winner of an election is the first entry of election_summary.
WinnerMatrix winner_heatmap(std::span<const ElectionTable> tables, ElectionType type);
WinnerMatrix winner_heatmap(const ElectionCatalog& catalog, ElectionType type);

enum class Metric { SeatsWon, SeatSharePct, VoteSharePct, Candidates };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;

struct PartySeries {
  std::string party;
  Metric metric = Metric::SeatsWon;
  std::vector<std::pair<int, double>> points; // strictly increasing years
  std::optional<TrendModel> model;            // present with two or more points
};

// One series per party, ordered by name.
std::vector<PartySeries> party_metric_series(std::span<const ElectionTable> tables,
                                             ElectionType type, Metric metric);
std::vector<PartySeries> party_metric_series(const ElectionCatalog& catalog, ElectionType type,
                                             Metric metric);

// Both readings of "which party led over history": total raw votes and wins.
struct PartyStanding {
  std::string party;
  std::int64_t total_votes = 0;
  int wins = 0;
};

// Ordered by total votes desc, then wins desc, then name.
std::vector<PartyStanding> party_leaderboard(std::span<const ElectionTable> tables,
                                             ElectionType type);

// JSON shapes served over HTTP.
nlohmann::json to_json(const TrendModel& model);
nlohmann::json to_json(const CandidateTrend& trend);
nlohmann::json to_json(const WinnerMatrix& matrix);
nlohmann::json to_json(const PartySeries& series);
nlohmann::json to_json(const PartySummary& summary);

} // namespace electmap
