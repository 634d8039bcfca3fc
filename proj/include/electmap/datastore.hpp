#pragma once

#include "electmap/types.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace electmap {

// Column order of every election CSV.
inline constexpr const char* kCsvHeader =
    "region_id,region_name,party,votes,vote_share_pct,seats,seat_share_pct,candidates,is_winner";

// "<type>_<year>[_cd].csv"
std::string election_file_name(ElectionType type, int year, RegionLevel level);

struct WriteOptions {
  bool allow_empty = false;
};

// Writes atomically (temp file + rename) under a per-path lock.
std::filesystem::path write_election_csv(const std::vector<ElectionResultRow>& rows,
                                         ElectionType type, int year, RegionLevel level,
                                         const std::filesystem::path& root,
                                         WriteOptions options = {});

std::string format_election_csv(const std::vector<ElectionResultRow>& rows);
std::vector<ElectionResultRow> parse_election_csv(std::string_view content);
std::vector<ElectionResultRow> read_election_csv(const std::filesystem::path& path);

struct CatalogEntry {
  ElectionType type = ElectionType::Federal;
  int year = 0;
  RegionLevel level = RegionLevel::Province;
  std::filesystem::path path;
  std::size_t row_count = 0;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct ElectionCatalog {
  // Sorted by (type, year, level).
  std::vector<CatalogEntry> entries;

  const CatalogEntry* find(ElectionType type, int year, RegionLevel level) const;
  // Province-level entry when present, otherwise the census-division one.
  const CatalogEntry* find_preferred(ElectionType type, int year) const;
};

// Files not following the naming convention are skipped with a warning.
// Two files naming the same (type, year, level) are an error.
ElectionCatalog build_catalog(const std::filesystem::path& root);

// Rows of one catalogued election, loaded into memory.
struct ElectionTable {
  CatalogEntry entry;
  std::vector<ElectionResultRow> rows;
};

std::vector<ElectionTable> load_catalog(const ElectionCatalog& catalog);

} // namespace electmap
