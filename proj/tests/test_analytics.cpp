#include "electmap/analytics.hpp"
#include "electmap/error.hpp"

#include "support/oracles.hpp"
#include "support/support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace electmap;
using namespace testsupport;

namespace {

ElectionTable table(ElectionType type, int year, std::vector<ElectionResultRow> rows,
                    RegionLevel level = RegionLevel::Province) {
  return {CatalogEntry{type, year, level, "t.csv", rows.size()}, std::move(rows)};
}

ElectionResultRow r(RegionId id, std::string party, std::optional<std::int64_t> votes,
                    std::optional<std::int64_t> seats = {}, std::optional<std::int64_t> candidates = {}) {
  ElectionResultRow row;
  row.region_id = id;
  row.party = std::move(party);
  row.votes = votes;
  row.seats = seats;
  row.candidates = candidates;
  return row;
}

} // namespace

TEST_CASE("exact lines") {
  const std::vector<DataPoint> a = {{0, 0}, {1, 1}, {2, 2}};
  const auto m = fit_ols(a);
  CHECK(m.slope == doctest::Approx(1));
  CHECK(m.intercept == doctest::Approx(0));
  CHECK(m.r2 == doctest::Approx(1));
  CHECK(m.n == 3);

  const std::vector<DataPoint> b = {{0, 1}, {1, 3}, {2, 5}};
  const auto mb = fit_ols(b);
  CHECK(mb.slope == doctest::Approx(2));
  CHECK(mb.intercept == doctest::Approx(1));
  CHECK(mb.mean_y == doctest::Approx(3));
  CHECK(mb.median_y == doctest::Approx(3));
}

TEST_CASE("median of an even sample averages the middle pair") {
  const std::vector<DataPoint> pts = {{1, 10}, {2, 40}, {3, 20}, {4, 30}};
  CHECK(fit_ols(pts).median_y == doctest::Approx(25));
  CHECK(fit_ols(pts).mean_y == doctest::Approx(25));
}

TEST_CASE("constant y gives r2 of one") {
  const std::vector<DataPoint> pts = {{1, 5}, {2, 5}, {3, 5}};
  const auto m = fit_ols(pts);
  CHECK(m.slope == 0);
  CHECK(m.r2 == 1);
}

TEST_CASE("fit_ols errors") {
  const std::vector<DataPoint> one = {{1, 1}};
  CHECK_THROWS_WITH_AS(fit_ols(one), doctest::Contains("TooFewPoints"), Error);
  const std::vector<DataPoint> same_x = {{3, 1}, {3, 2}, {3, 9}};
  CHECK_THROWS_WITH_AS(fit_ols(same_x), doctest::Contains("DegenerateX"), Error);
  const std::vector<DataPoint> nan = {{1, 1}, {2, std::nan("")}};
  CHECK_THROWS_AS(fit_ols(nan), Error);
}

TEST_CASE("predict") {
  TrendModel m;
  m.slope = 1;
  CHECK(predict(m, 7) == 7);
  const std::vector<DataPoint> pts = {{2015, 300}, {2011, 280}};
  CHECK(predict(fit_ols(pts), 2019) == doctest::Approx(320).epsilon(1e-12));
}

TEST_CASE("OLS agrees with the normal-equations oracle") {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 100; ++iter) {
    const auto pts = random_dataset(rng);
    const auto m = fit_ols(pts);
    const auto [slope, intercept] = normal_equations(pts);
    const double s = static_cast<double>(slope), c = static_cast<double>(intercept);
    CHECK(std::abs(m.slope - s) <= 1e-9 * std::abs(s));
    CHECK(std::abs(m.intercept - c) <= 1e-9 * std::max(std::abs(c), std::abs(m.mean_y)));
    CHECK(m.r2 >= 0);
    CHECK(m.r2 <= 1);
  }
}

TEST_CASE("residuals are orthogonal to 1 and x") {
  std::mt19937_64 rng(43);
  for (int iter = 0; iter < 100; ++iter) {
    const auto pts = random_dataset(rng);
    const auto m = fit_ols(pts);
    long double sum = 0, sum_x = 0, max_x = 1, max_y = 1;
    for (const auto& p : pts) {
      const long double res = static_cast<long double>(p.y) - m.intercept - static_cast<long double>(m.slope) * p.x;
      sum += res;
      sum_x += res * p.x;
      max_x = std::max(max_x, std::abs(static_cast<long double>(p.x)));
      max_y = std::max(max_y, std::abs(static_cast<long double>(p.y)));
    }
    const long double scale = static_cast<long double>(pts.size()) * max_y;
    CHECK(std::abs(static_cast<double>(sum)) <= 1e-8 * static_cast<double>(scale));
    CHECK(std::abs(static_cast<double>(sum_x)) <= 1e-8 * static_cast<double>(scale * max_x));
  }
}

TEST_CASE("shifting x leaves predictions unchanged") {
  std::mt19937_64 rng(44);
  for (int iter = 0; iter < 50; ++iter) {
    const auto pts = random_dataset(rng);
    auto shifted = pts;
    for (auto& p : shifted) p.x -= 1867;
    const auto a = fit_ols(pts), b = fit_ols(shifted);
    for (const auto& p : pts) {
      const double pa = predict(a, p.x), pb = predict(b, p.x - 1867);
      CHECK(std::abs(pa - pb) <= 1e-9 * std::max(1.0, std::abs(pa)));
    }
  }
}

TEST_CASE("exact integer lines give r2 of one") {
  std::mt19937_64 rng(45);
  std::uniform_int_distribution<int> coef(-50, 50), n(2, 200);
  for (int iter = 0; iter < 50; ++iter) {
    const int a = coef(rng), b = coef(rng) == 0 ? 1 : coef(rng);
    std::vector<DataPoint> pts;
    for (int i = 0, count = n(rng); i < count; ++i) pts.push_back({1867.0 + 4 * i, a + b * (1867.0 + 4 * i)});
    CHECK(fit_ols(pts).r2 == doctest::Approx(1).epsilon(1e-12));
  }
}

TEST_CASE("summary of two parties") {
  const std::vector<ElectionResultRow> rows = {r(1, "A", 60), r(1, "B", 40)};
  const auto s = election_summary(rows);
  REQUIRE(s.size() == 2);
  CHECK(s[0].party == "A");
  CHECK(*s[0].vote_share_pct == doctest::Approx(60.0));
  CHECK(*s[1].vote_share_pct == doctest::Approx(40.0));
  CHECK(s[0].seats == 1);
  CHECK(s[1].seats == 0);
}

TEST_CASE("Provincial 2019 summary has 13 single-seat entries") {
  const auto s = election_summary(provincial_2019_rows());
  REQUIRE(s.size() == 13);
  for (const auto& p : s) {
    CHECK(p.seats == 1);
    CHECK_FALSE(p.votes);
    CHECK(*p.seat_share_pct == doctest::Approx(100.0 / 13));
  }
  CHECK(std::is_sorted(s.begin(), s.end(), [](const PartySummary& a, const PartySummary& b) { return a.party < b.party; }));
}

TEST_CASE("recomputed shares agree with given ones and sum to 100") {
  std::mt19937_64 rng(46);
  std::uniform_int_distribution<std::int64_t> votes(0, 100000);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<ElectionResultRow> rows;
    std::int64_t total = 0;
    for (int p = 0; p < 6; ++p) {
      rows.push_back(r(1, "P" + std::to_string(p), votes(rng), p));
      total += *rows.back().votes;
    }
    if (total == 0) continue;
    for (auto& row : rows) row.vote_share_pct = std::round(1000.0 * static_cast<double>(*row.votes) / static_cast<double>(total)) / 10;
    auto without = rows;
    for (auto& row : without) row.vote_share_pct.reset();
    const auto given = election_summary(rows), computed = election_summary(without);
    double sum = 0;
    for (std::size_t i = 0; i < given.size(); ++i) {
      CHECK(given[i].party == computed[i].party);
      CHECK(std::abs(*given[i].vote_share_pct - *computed[i].vote_share_pct) <= 0.1);
      sum += *computed[i].vote_share_pct;
    }
    CHECK(std::abs(sum - 100) <= 0.5);
  }
}

TEST_CASE("summary sorts by seats, votes, name and flags estimated candidates") {
  const std::vector<ElectionResultRow> rows = {r(1, "C", 10, 5, 3), r(2, "B", 30, 5, 4), r(3, "A", 30, 5),
                                               r(4, "D", 99, 1, 2)};
  const auto s = election_summary(rows);
  CHECK(s[0].party == "A");
  CHECK(s[1].party == "B");
  CHECK(s[2].party == "C");
  CHECK(s[3].party == "D");
  CHECK(s[0].candidates_estimated);
  CHECK(s[0].candidates == 1);
  CHECK_FALSE(s[1].candidates_estimated);
}

TEST_CASE("candidate trend") {
  const std::vector<ElectionTable> tables = {
      table(ElectionType::Federal, 1867, {r(35, "A", {}, {}, 6), r(24, "B", {}, {}, 4)}),
      table(ElectionType::Federal, 1872, {r(35, "A", {}, {}, 12)}),
      table(ElectionType::Provincial, 2019, provincial_2019_rows())};
  const auto t = candidate_trend(tables, ElectionType::Federal);
  REQUIRE(t.series.size() == 2);
  CHECK(t.series[0].total == 10);
  CHECK(t.series[1].total == 12);
  CHECK(t.model.slope == doctest::Approx(0.4));
  CHECK_FALSE(t.series[0].estimated);

  const std::vector<ElectionTable> one = {table(ElectionType::Federal, 1867, {r(1, "A", 1, 1, 1)})};
  CHECK_THROWS_WITH_AS(candidate_trend(one, ElectionType::Federal), doctest::Contains("InsufficientData"), Error);
}

TEST_CASE("missing candidate counts are estimated per party and region") {
  const std::vector<ElectionTable> tables = {
      table(ElectionType::Federal, 1867, {r(35, "A", 1), r(35, "A", 2), r(35, "B", 1), r(24, "A", 1)}),
      table(ElectionType::Federal, 1872, {r(35, "A", {}, {}, 9)})};
  const auto t = candidate_trend(tables, ElectionType::Federal);
  CHECK(t.series[0].estimated);
  CHECK(t.series[0].total == 3);
  CHECK_FALSE(t.series[1].estimated);
}

TEST_CASE("province-level tables win over census divisions for the same year") {
  const std::vector<ElectionTable> tables = {
      table(ElectionType::Federal, 1963, {r(4806, "A", {}, {}, 100)}, RegionLevel::CensusDivision),
      table(ElectionType::Federal, 1963, {r(48, "A", {}, {}, 7)}),
      table(ElectionType::Federal, 1965, {r(4806, "A", {}, {}, 50)}, RegionLevel::CensusDivision)};
  const auto picked = elections_of(tables, ElectionType::Federal);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0]->entry.level == RegionLevel::Province);
  CHECK(picked[1]->entry.year == 1965);
}

TEST_CASE("winner heat map for three elections") {
  const std::vector<ElectionTable> tables = {table(ElectionType::Federal, 1867, {r(1, "A", 10, 3), r(1, "B", 5, 1)}),
                                             table(ElectionType::Federal, 1872, {r(1, "A", 10, 1), r(1, "B", 5, 3)}),
                                             table(ElectionType::Federal, 1874, {r(1, "A", 10, 3), r(1, "B", 5, 1)})};
  const auto m = winner_heatmap(tables, ElectionType::Federal);
  CHECK(m.parties == std::vector<std::string>{"A", "B"});
  CHECK(m.years == std::vector<int>{1867, 1872, 1874});
  CHECK(m.wins == std::vector<std::vector<int>>{{1, 0, 1}, {0, 1, 0}});
}

TEST_CASE("heat map ties order by name") {
  const std::vector<ElectionTable> tables = {table(ElectionType::Federal, 1867, {r(1, "Zed", 10, 3)}),
                                             table(ElectionType::Federal, 1872, {r(1, "Abe", 10, 3)})};
  CHECK(winner_heatmap(tables, ElectionType::Federal).parties == std::vector<std::string>{"Abe", "Zed"});
}

TEST_CASE("heat map columns sum to one over generated catalogs") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> elections(1, 30), parties(1, 6), regions(1, 8);
  std::uniform_int_distribution<std::int64_t> seats(0, 50), votes(0, 100000);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<ElectionTable> tables;
    int year = 1867;
    for (int e = 0, n = elections(rng); e < n; ++e) {
      std::vector<ElectionResultRow> rows;
      const int np = parties(rng);
      for (int g = 0, nr = regions(rng); g < nr; ++g)
        for (int p = 0; p < np; ++p) rows.push_back(r(g + 1, "Party " + std::string(1, static_cast<char>('A' + p)), votes(rng), seats(rng)));
      tables.push_back(table(ElectionType::Federal, year, rows));
      year += 1 + static_cast<int>(rng() % 5);
    }
    const auto m = winner_heatmap(tables, ElectionType::Federal);
    std::map<std::string, int> totals;
    for (std::size_t y = 0; y < m.years.size(); ++y) {
      int col = 0;
      for (std::size_t p = 0; p < m.parties.size(); ++p) col += m.wins[p][y];
      CHECK(col == 1);
    }
    for (std::size_t p = 0; p < m.parties.size(); ++p)
      for (int w : m.wins[p]) totals[m.parties[p]] += w;
    for (std::size_t p = 1; p < m.parties.size(); ++p) {
      const int a = totals[m.parties[p - 1]], b = totals[m.parties[p]];
      CHECK((a > b || (a == b && m.parties[p - 1] < m.parties[p])));
    }
    // The winner of each column is the party with most seats.
    for (std::size_t y = 0; y < m.years.size(); ++y) {
      const auto summary = election_summary(tables[y].rows);
      for (std::size_t p = 0; p < m.parties.size(); ++p)
        if (m.wins[p][y]) CHECK(summary.front().party == m.parties[p]);
    }
  }
}

TEST_CASE("party series") {
  auto share_row = [](const char* party, double share) {
    ElectionResultRow row = r(1, party, {});
    row.vote_share_pct = share;
    return row;
  };
  const std::vector<ElectionTable> tables = {
      table(ElectionType::Federal, 1867, {share_row("Liberal", 50), share_row("Reform", 10)}),
      table(ElectionType::Federal, 1872, {share_row("Liberal", 40)}),
      table(ElectionType::Federal, 1874, {share_row("Liberal", 30)})};
  const auto series = party_metric_series(tables, ElectionType::Federal, Metric::VoteSharePct);
  REQUIRE(series.size() == 2);
  CHECK(series[0].party == "Liberal");
  REQUIRE(series[0].model);
  CHECK(series[0].model->slope < 0);
  const std::vector<DataPoint> pts = {{1867, 50}, {1872, 40}, {1874, 30}};
  CHECK(series[0].model->slope == doctest::Approx(fit_ols(pts).slope));
  CHECK(series[0].model->intercept == doctest::Approx(fit_ols(pts).intercept));
  CHECK(series[1].party == "Reform");
  CHECK(series[1].points.size() == 1);
  CHECK_FALSE(series[1].model);

  const std::vector<ElectionTable> one = {tables[0]};
  CHECK_THROWS_WITH_AS(party_metric_series(one, ElectionType::Federal, Metric::SeatsWon),
                       doctest::Contains("InsufficientData"), Error);
  CHECK(parse_metric("Seat_Share_Pct") == Metric::SeatSharePct);
  CHECK_FALSE(parse_metric("popularity"));
}

TEST_CASE("leaderboard exposes both readings") {
  const std::vector<ElectionTable> tables = {
      table(ElectionType::Provincial, 2011, {r(1, "A", 100, 1), r(2, "B", 900, 0), r(3, "A", 50, 1)}),
      table(ElectionType::Provincial, 2015, {r(1, "A", 100, 2), r(2, "B", 800, 1)})};
  const auto board = party_leaderboard(tables, ElectionType::Provincial);
  REQUIRE(board.size() == 2);
  CHECK(board[0].party == "B");
  CHECK(board[0].total_votes == 1700);
  CHECK(board[0].wins == 0);
  CHECK(board[1].party == "A");
  CHECK(board[1].wins == 2);
}

TEST_CASE("JSON shapes") {
  const std::vector<DataPoint> pts = {{1867, 10}, {1872, 12}};
  const auto j = to_json(fit_ols(pts));
  for (const char* key : {"slope", "intercept", "r2", "mean", "median", "n"}) CHECK(j.contains(key));

  CandidateTrend t;
  t.series = {{1867, 10, true}, {1872, 12, false}};
  t.model = fit_ols(pts);
  const auto jt = to_json(t);
  CHECK(jt["series"] == nlohmann::json::parse("[[1867,10.0],[1872,12.0]]"));
  CHECK(jt["estimated_years"] == nlohmann::json::parse("[1867]"));

  WinnerMatrix m{{"A"}, {1867}, {{1}}};
  CHECK(to_json(m) == nlohmann::json::parse(R"({"parties":["A"],"years":[1867],"wins":[[1]]})"));

  PartySeries s{"A", Metric::SeatsWon, {{1867, 3}}, std::nullopt};
  CHECK(to_json(s)["model"].is_null());
  CHECK(to_json(s)["metric"] == "seats_won");
}
