#include "electmap/datastore.hpp"
#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"

#include "support/support.hpp"

#include <doctest.h>

#include <random>
#include <thread>

using namespace electmap;
using namespace testsupport;

TEST_CASE("file names follow <type>_<year>[_cd].csv") {
  CHECK(election_file_name(ElectionType::Provincial, 2019, RegionLevel::Province) == "provincial_2019.csv");
  CHECK(election_file_name(ElectionType::Federal, 1963, RegionLevel::CensusDivision) == "federal_1963_cd.csv");
}

TEST_CASE("Provincial 2019 rows write and read back") {
  TempDir dir;
  const auto path = write_election_csv(provincial_2019_rows(), ElectionType::Provincial, 2019,
                                       RegionLevel::Province, dir.path());
  CHECK(path.filename() == "provincial_2019.csv");
  const std::string content = read_file(path);
  CHECK(content.starts_with(std::string(kCsvHeader) + "\r\n"));
  std::size_t lines = 0;
  for (std::size_t at = 0; (at = content.find("\r\n", at)) != std::string::npos; at += 2) ++lines;
  CHECK(lines == 14);
  CHECK(content.find("\r\n48,\"Alberta (Apr 16, '19)\",United Conservative Party,,,,,,false\r\n") !=
        std::string::npos);
  CHECK(read_election_csv(path) == provincial_2019_rows());
}

TEST_CASE("empty row lists need the allow-empty flag") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(write_election_csv({}, ElectionType::Federal, 1867, RegionLevel::Province, dir.path()),
                       doctest::Contains("RefusedEmpty"), Error);
  const auto path = write_election_csv({}, ElectionType::Federal, 1867, RegionLevel::Province, dir.path(),
                                       WriteOptions{.allow_empty = true});
  CHECK(read_file(path) == std::string(kCsvHeader) + "\r\n");
  CHECK(read_election_csv(path).empty());
}

TEST_CASE("a party name with a comma is quoted and survives") {
  ElectionResultRow row;
  row.region_id = 24;
  row.region_name = "Quebec";
  row.party = "Coalition Avenir Québec, L'équipe François Legault";
  row.votes = 1509455;
  row.vote_share_pct = 37.42;
  row.is_winner = true;
  const std::string csv = format_election_csv({row});
  CHECK(csv.find("\"Coalition Avenir Québec, L'équipe François Legault\"") != std::string::npos);
  CHECK(parse_election_csv(csv) == std::vector<ElectionResultRow>{row});
}

TEST_CASE("round trip over generated rows") {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 300; ++iter) {
    const auto rows = random_rows(rng, 25);
    const auto back = parse_election_csv(format_election_csv(rows));
    REQUIRE(back == rows);
  }
}

TEST_CASE("doubles keep every bit") {
  ElectionResultRow row;
  row.region_id = 1;
  row.party = "P";
  for (double v : {0.1, 1.0 / 3.0, 99.99999999999999, 5e-324, 100.0, 0.0}) {
    row.vote_share_pct = v;
    CHECK(*parse_election_csv(format_election_csv({row}))[0].vote_share_pct == v);
  }
}

TEST_CASE("header and row errors") {
  const std::string shuffled =
      "region_name,region_id,party,votes,vote_share_pct,seats,seat_share_pct,candidates,is_winner\r\n";
  CHECK_THROWS_WITH_AS(parse_election_csv(shuffled), doctest::Contains("HeaderMismatch"), Error);
  CHECK_THROWS_WITH_AS(parse_election_csv(""), doctest::Contains("HeaderMismatch"), Error);

  const std::string header = std::string(kCsvHeader) + "\r\n";
  auto line_of = [&](const std::string& body) -> std::size_t {
    try {
      parse_election_csv(header + body);
    } catch (const RowParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("1,a,P,,,,,,false\r\nx,a,P,,,,,,false\r\n") == 3);
  CHECK(line_of("1,a,P,,,,,,maybe\r\n") == 2);
  CHECK(line_of("1,a,P,-5,,,,,false\r\n") == 2);
  CHECK(line_of("1,a,P,,101,,,,false\r\n") == 2);
  CHECK(line_of("1,a,P,,,,,false\r\n") == 2);
  // The quoted field spans lines 2-3, so the bad record starts on line 4.
  CHECK(line_of("1,\"a\nb\",P,,,,,,false\r\n2,a,,,,,,,false\r\n") == 4);
  CHECK(line_of("1,\"open,P,,,,,,false\r\n") == 2);
}

TEST_CASE("reader tolerates a BOM and LF endings") {
  const std::string csv = "\xEF\xBB\xBF" + std::string(kCsvHeader) + "\n7,Seven,P,10,,,,,true\n";
  const auto rows = parse_election_csv(csv);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].region_id == 7);
  CHECK(rows[0].votes == 10);
  CHECK(rows[0].is_winner);
}

TEST_CASE("concurrent writers leave one complete file") {
  TempDir dir;
  std::vector<std::vector<ElectionResultRow>> versions;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 8; ++i) {
    auto rows = random_rows(rng, 40);
    if (rows.empty()) rows = provincial_2019_rows();
    versions.push_back(rows);
  }
  std::vector<std::thread> threads;
  for (const auto& rows : versions)
    threads.emplace_back([&, rows] {
      for (int k = 0; k < 5; ++k)
        write_election_csv(rows, ElectionType::Federal, 1900, RegionLevel::Province, dir.path());
    });
  for (auto& t : threads) t.join();
  const auto back = read_election_csv(dir.path() / "federal_1900.csv");
  CHECK(std::find(versions.begin(), versions.end(), back) != versions.end());
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}

TEST_CASE("catalog lists conforming files sorted") {
  TempDir dir;
  const auto rows = provincial_2019_rows();
  write_election_csv(rows, ElectionType::Provincial, 2019, RegionLevel::Province, dir.path());
  write_election_csv(rows, ElectionType::Federal, 1963, RegionLevel::Province, dir.path());
  write_election_csv({rows[0]}, ElectionType::Federal, 1867, RegionLevel::Province, dir.path());
  write_election_csv(rows, ElectionType::Federal, 1963, RegionLevel::CensusDivision, dir.path());
  write_file(dir.path() / "notes.txt", "scratch");
  write_file(dir.path() / "federal_63.csv", "x");

  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](const std::string& m) { warnings.push_back(m); });
  const auto catalog = build_catalog(dir.path());
  REQUIRE(catalog.entries.size() == 4);
  CHECK(catalog.entries[0].type == ElectionType::Federal);
  CHECK(catalog.entries[0].year == 1867);
  CHECK(catalog.entries[0].row_count == 1);
  CHECK(catalog.entries[1].year == 1963);
  CHECK(catalog.entries[1].level == RegionLevel::Province);
  CHECK(catalog.entries[2].level == RegionLevel::CensusDivision);
  CHECK(catalog.entries[3].type == ElectionType::Provincial);
  CHECK(catalog.entries[3].row_count == 13);
  CHECK(warnings.size() == 2);

  CHECK(catalog.find(ElectionType::Federal, 1963, RegionLevel::CensusDivision)->path.filename() ==
        "federal_1963_cd.csv");
  CHECK(catalog.find(ElectionType::Federal, 1999, RegionLevel::Province) == nullptr);
  CHECK(catalog.find_preferred(ElectionType::Federal, 1963)->level == RegionLevel::Province);

  const auto tables = load_catalog(catalog);
  REQUIRE(tables.size() == 4);
  CHECK(tables[3].rows == rows);
}

TEST_CASE("catalog edge cases") {
  TempDir dir;
  CHECK(build_catalog(dir.path()).entries.empty());

  write_file(dir.path() / "notes.txt", "scratch");
  write_election_csv(provincial_2019_rows(), ElectionType::Federal, 1963, RegionLevel::Province, dir.path());
  ScopedWarningSink quiet([](const std::string&) {});
  CHECK(build_catalog(dir.path()).entries.size() == 1);

  write_file(dir.path() / "Federal_1963.CSV", std::string(kCsvHeader) + "\r\n");
  CHECK_THROWS_WITH_AS(build_catalog(dir.path()), doctest::Contains("Federal_1963.CSV"), Error);
  CHECK_THROWS_WITH_AS(build_catalog(dir.path()), doctest::Contains("federal_1963.csv"), Error);

  CHECK_THROWS_WITH_AS(build_catalog(dir.path() / "missing"), doctest::Contains("IoError"), Error);
}
