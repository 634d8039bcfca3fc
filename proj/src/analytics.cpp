#include "electmap/analytics.hpp"
#include "electmap/error.hpp"
#include "electmap/join.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace electmap {

TrendModel fit_ols(std::span<const DataPoint> points) {
  if (points.size() < 2) throw Error(Errc::TooFewPoints, "need at least two points");
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(Errc::InvalidArgument, "non-finite sample");
  const double n = static_cast<double>(points.size());
  double mean_x = 0, mean_y = 0;
  for (const auto& p : points) {
    mean_x += p.x;
    mean_y += p.y;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    const double dx = p.x - mean_x;
    const double dy = p.y - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error(Errc::DegenerateX, "all x values are equal");

  TrendModel model;
  model.n = points.size();
  model.slope = sxy / sxx;
  model.intercept = mean_y - model.slope * mean_x;
  model.mean_y = mean_y;

  double ss_res = 0;
  for (const auto& p : points) {
    const double r = (p.y - mean_y) - model.slope * (p.x - mean_x);
    ss_res += r * r;
  }
  model.r2 = syy == 0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);

  std::vector<double> ys;
  ys.reserve(points.size());
  for (const auto& p : points) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  const std::size_t mid = ys.size() / 2;
  model.median_y = ys.size() % 2 ? ys[mid] : (ys[mid - 1] + ys[mid]) / 2;
  return model;
}

// ---------------------------------------------------------------------------

std::vector<PartySummary> election_summary(std::span<const ElectionResultRow> rows) {
  // Region winners decide seats for rows that carry no seat count.
  std::map<RegionId, std::vector<const ElectionResultRow*>> by_region;
  for (const auto& row : rows) by_region[row.region_id].push_back(&row);
  std::set<const ElectionResultRow*> region_winners;
  for (const auto& [id, region_rows] : by_region) region_winners.insert(&pick_winner(region_rows));

  struct Acc {
    PartySummary summary;
    std::size_t row_count = 0;
    std::optional<double> given_vote_share;
    std::optional<double> given_seat_share;
    std::set<RegionId> estimated_regions;
  };
  std::map<std::string, Acc> parties;
  std::int64_t total_votes = 0;
  for (const auto& row : rows) {
    Acc& acc = parties[row.party];
    acc.summary.party = row.party;
    ++acc.row_count;
    if (row.votes) {
      acc.summary.votes = acc.summary.votes.value_or(0) + *row.votes;
      total_votes += *row.votes;
    }
    if (row.seats)
      acc.summary.seats += *row.seats;
    else if (region_winners.contains(&row))
      acc.summary.seats += 1;
    if (row.candidates)
      acc.summary.candidates += *row.candidates;
    else
      acc.estimated_regions.insert(row.region_id);
    acc.given_vote_share = row.vote_share_pct;
    acc.given_seat_share = row.seat_share_pct;
  }
  std::int64_t total_seats = 0;
  for (const auto& [name, acc] : parties) total_seats += acc.summary.seats;

  std::vector<PartySummary> out;
  out.reserve(parties.size());
  for (auto& [name, acc] : parties) {
    PartySummary s = std::move(acc.summary);
    const bool single = acc.row_count == 1;
    if (single && acc.given_vote_share)
      s.vote_share_pct = acc.given_vote_share;
    else if (total_votes > 0)
      s.vote_share_pct = 100.0 * static_cast<double>(s.votes.value_or(0)) / static_cast<double>(total_votes);
    if (single && acc.given_seat_share)
      s.seat_share_pct = acc.given_seat_share;
    else if (total_seats > 0)
      s.seat_share_pct = 100.0 * static_cast<double>(s.seats) / static_cast<double>(total_seats);
    if (!acc.estimated_regions.empty()) {
      s.candidates += static_cast<std::int64_t>(acc.estimated_regions.size());
      s.candidates_estimated = true;
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const PartySummary& a, const PartySummary& b) {
    if (a.seats != b.seats) return a.seats > b.seats;
    const auto va = a.votes.value_or(-1), vb = b.votes.value_or(-1);
    if (va != vb) return va > vb;
    return a.party < b.party;
  });
  return out;
}

std::vector<const ElectionTable*> elections_of(std::span<const ElectionTable> tables,
                                               ElectionType type) {
  std::map<int, const ElectionTable*> by_year;
  for (const auto& t : tables) {
    if (t.entry.type != type) continue;
    auto& slot = by_year[t.entry.year];
    if (!slot || (t.entry.level == RegionLevel::Province && slot->entry.level != RegionLevel::Province))
      slot = &t;
  }
  std::vector<const ElectionTable*> out;
  for (const auto& [year, table] : by_year) out.push_back(table);
  return out;
}

CandidateTrend candidate_trend(std::span<const ElectionTable> tables, ElectionType type) {
  const auto elections = elections_of(tables, type);
  if (elections.size() < 2)
    throw Error(Errc::InsufficientData, "candidate trend needs at least two " +
                                            std::string(to_string(type)) + " elections");
  CandidateTrend trend;
  std::vector<DataPoint> points;
  for (const auto* election : elections) {
    CandidatePoint point;
    point.year = election->entry.year;
    std::set<std::pair<std::string, RegionId>> estimated;
    for (const auto& row : election->rows) {
      if (row.candidates)
        point.total += static_cast<double>(*row.candidates);
      else
        estimated.emplace(row.party, row.region_id);
    }
    point.total += static_cast<double>(estimated.size());
    point.estimated = !estimated.empty();
    trend.series.push_back(point);
    points.push_back({static_cast<double>(point.year), point.total});
  }
  trend.model = fit_ols(points);
  return trend;
}

CandidateTrend candidate_trend(const ElectionCatalog& catalog, ElectionType type) {
  const auto tables = load_catalog(catalog);
  return candidate_trend(tables, type);
}

namespace {

std::string national_winner(const ElectionTable& election) {
  if (election.rows.empty())
    throw Error(Errc::InsufficientData, election.entry.path.string() + " has no rows to pick a winner from");
  return election_summary(election.rows).front().party;
}

} // namespace

WinnerMatrix winner_heatmap(std::span<const ElectionTable> tables, ElectionType type) {
  const auto elections = elections_of(tables, type);
  WinnerMatrix matrix;
  std::vector<std::string> winners;
  std::map<std::string, int> win_count;
  for (const auto* election : elections) {
    matrix.years.push_back(election->entry.year);
    winners.push_back(national_winner(*election));
    ++win_count[winners.back()];
  }
  for (const auto& [party, wins] : win_count) matrix.parties.push_back(party);
  std::sort(matrix.parties.begin(), matrix.parties.end(), [&](const std::string& a, const std::string& b) {
    if (win_count[a] != win_count[b]) return win_count[a] > win_count[b];
    return a < b;
  });
  for (const auto& party : matrix.parties) {
    std::vector<int> row;
    row.reserve(winners.size());
    for (const auto& w : winners) row.push_back(w == party ? 1 : 0);
    matrix.wins.push_back(std::move(row));
  }
  return matrix;
}

WinnerMatrix winner_heatmap(const ElectionCatalog& catalog, ElectionType type) {
  const auto tables = load_catalog(catalog);
  return winner_heatmap(tables, type);
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
  case Metric::SeatsWon: return "seats_won";
  case Metric::SeatSharePct: return "seat_share_pct";
  case Metric::VoteSharePct: return "vote_share_pct";
  case Metric::Candidates: return "candidates";
  }
  return "seats_won";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  for (Metric m : {Metric::SeatsWon, Metric::SeatSharePct, Metric::VoteSharePct, Metric::Candidates})
    if (text::iequals(text, to_string(m))) return m;
  return std::nullopt;
}

std::vector<PartySeries> party_metric_series(std::span<const ElectionTable> tables,
                                             ElectionType type, Metric metric) {
  const auto elections = elections_of(tables, type);
  if (elections.size() < 2)
    throw Error(Errc::InsufficientData, "party series need at least two " +
                                            std::string(to_string(type)) + " elections");
  std::map<std::string, PartySeries> series;
  for (const auto* election : elections) {
    for (const auto& s : election_summary(election->rows)) {
      std::optional<double> value;
      switch (metric) {
      case Metric::SeatsWon: value = static_cast<double>(s.seats); break;
      case Metric::SeatSharePct: value = s.seat_share_pct; break;
      case Metric::VoteSharePct: value = s.vote_share_pct; break;
      case Metric::Candidates: value = static_cast<double>(s.candidates); break;
      }
      if (!value) continue;
      auto& entry = series[s.party];
      entry.party = s.party;
      entry.metric = metric;
      entry.points.emplace_back(election->entry.year, *value);
    }
  }
  std::vector<PartySeries> out;
  out.reserve(series.size());
  for (auto& [party, s] : series) {
    if (s.points.size() >= 2) {
      std::vector<DataPoint> pts;
      for (const auto& [year, v] : s.points) pts.push_back({static_cast<double>(year), v});
      s.model = fit_ols(pts);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PartySeries> party_metric_series(const ElectionCatalog& catalog, ElectionType type,
                                             Metric metric) {
  const auto tables = load_catalog(catalog);
  return party_metric_series(tables, type, metric);
}

std::vector<PartyStanding> party_leaderboard(std::span<const ElectionTable> tables,
                                             ElectionType type) {
  std::map<std::string, PartyStanding> standings;
  for (const auto* election : elections_of(tables, type)) {
    const auto summary = election_summary(election->rows);
    for (const auto& s : summary) {
      auto& st = standings[s.party];
      st.party = s.party;
      st.total_votes += s.votes.value_or(0);
    }
    if (!summary.empty()) ++standings[summary.front().party].wins;
  }
  std::vector<PartyStanding> out;
  for (auto& [party, st] : standings) out.push_back(std::move(st));
  std::sort(out.begin(), out.end(), [](const PartyStanding& a, const PartyStanding& b) {
    if (a.total_votes != b.total_votes) return a.total_votes > b.total_votes;
    if (a.wins != b.wins) return a.wins > b.wins;
    return a.party < b.party;
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

nlohmann::json to_json(const TrendModel& model) {
  return {{"slope", model.slope}, {"intercept", model.intercept}, {"r2", model.r2},
          {"mean", model.mean_y}, {"median", model.median_y},      {"n", model.n}};
}

nlohmann::json to_json(const CandidateTrend& trend) {
  nlohmann::json series = nlohmann::json::array();
  nlohmann::json estimated = nlohmann::json::array();
  for (const auto& p : trend.series) {
    series.push_back({p.year, p.total});
    if (p.estimated) estimated.push_back(p.year);
  }
  return {{"series", series}, {"estimated_years", estimated}, {"model", to_json(trend.model)}};
}

nlohmann::json to_json(const WinnerMatrix& matrix) {
  return {{"parties", matrix.parties}, {"years", matrix.years}, {"wins", matrix.wins}};
}

nlohmann::json to_json(const PartySeries& series) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [year, v] : series.points) points.push_back({year, v});
  return {{"party", series.party},
          {"metric", to_string(series.metric)},
          {"series", points},
          {"model", series.model ? to_json(*series.model) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const PartySummary& s) {
  return {{"party", s.party},
          {"votes", optional_json(s.votes)},
          {"vote_share_pct", optional_json(s.vote_share_pct)},
          {"seats", s.seats},
          {"seat_share_pct", optional_json(s.seat_share_pct)},
          {"candidates", s.candidates},
          {"candidates_estimated", s.candidates_estimated}};
}

} // namespace electmap
