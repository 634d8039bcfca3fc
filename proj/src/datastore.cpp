#include "electmap/datastore.hpp"
#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

namespace electmap {

namespace fs = std::filesystem;

std::string election_file_name(ElectionType type, int year, RegionLevel level) {
  std::string name = std::string(to_string(type)) + "_" + std::to_string(year);
  if (level == RegionLevel::CensusDivision) name += "_cd";
  return name + ".csv";
}

namespace {

constexpr std::size_t kColumnCount = 9;

void append_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

template <typename T>
std::string optional_text(const std::optional<T>& value) {
  if (!value) return {};
  if constexpr (std::is_same_v<T, double>)
    return text::format_double(*value);
  else
    return std::to_string(*value);
}

std::mutex& lock_table_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<std::mutex> path_lock(const fs::path& path) {
  static std::map<std::string, std::shared_ptr<std::mutex>> locks;
  std::lock_guard guard(lock_table_mutex());
  auto& m = locks[fs::absolute(path).lexically_normal().string()];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

} // namespace

std::string format_election_csv(const std::vector<ElectionResultRow>& rows) {
  std::string out = kCsvHeader;
  out += "\r\n";
  for (const auto& row : rows) {
    out += std::to_string(row.region_id);
    out.push_back(',');
    append_field(out, row.region_name);
    out.push_back(',');
    append_field(out, row.party);
    out.push_back(',');
    out += optional_text(row.votes);
    out.push_back(',');
    out += optional_text(row.vote_share_pct);
    out.push_back(',');
    out += optional_text(row.seats);
    out.push_back(',');
    out += optional_text(row.seat_share_pct);
    out.push_back(',');
    out += optional_text(row.candidates);
    out.push_back(',');
    out += row.is_winner ? "true" : "false";
    out += "\r\n";
  }
  return out;
}

fs::path write_election_csv(const std::vector<ElectionResultRow>& rows, ElectionType type,
                            int year, RegionLevel level, const fs::path& root,
                            WriteOptions options) {
  if (rows.empty() && !options.allow_empty)
    throw Error(Errc::RefusedEmpty, "no rows for " + election_file_name(type, year, level));
  const fs::path path = root / election_file_name(type, year, level);
  const std::string content = format_election_csv(rows);

  const auto lock = path_lock(path);
  std::lock_guard guard(*lock);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + root.string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(Errc::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(Errc::IoError, "cannot rename into " + path.string() + ": " + ec.message());
  }
  return path;
}

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC-4180 records; quoted fields may span lines.
std::vector<Record> split_records(std::string_view content) {
  std::vector<Record> records;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    Record rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < n && content[i] == '"') {
        ++i;
        while (true) {
          if (i >= n) throw RowParseError(rec.line, "unterminated quoted field");
          const char c = content[i++];
          if (c == '"') {
            if (i < n && content[i] == '"') {
              field.push_back('"');
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (i < n && content[i] != ',' && content[i] != '\r' && content[i] != '\n')
          throw RowParseError(rec.line, "text after closing quote");
      } else {
        while (i < n && content[i] != ',' && content[i] != '\r' && content[i] != '\n') {
          if (content[i] == '"') throw RowParseError(rec.line, "quote inside unquoted field");
          field.push_back(content[i++]);
        }
      }
      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= n) {
        done = true;
      } else if (content[i] == ',') {
        ++i;
      } else {
        if (content[i] == '\r') ++i;
        if (i < n && content[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

ElectionResultRow parse_row(const Record& rec) {
  const auto& f = rec.fields;
  if (f.size() != kColumnCount)
    throw RowParseError(rec.line, "expected 9 fields, found " + std::to_string(f.size()));
  auto count = [&](const std::string& cell, const char* name) -> std::optional<std::int64_t> {
    if (cell.empty()) return std::nullopt;
    auto v = text::parse_int(cell);
    if (!v || *v < 0 || text::trim(cell).size() != cell.size())
      throw RowParseError(rec.line, std::string("bad ") + name + " '" + cell + "'");
    return v;
  };
  auto share = [&](const std::string& cell, const char* name) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    auto v = text::parse_double(cell);
    if (!v || *v < 0.0 || *v > 100.0 || text::trim(cell).size() != cell.size())
      throw RowParseError(rec.line, std::string("bad ") + name + " '" + cell + "'");
    return v;
  };
  ElectionResultRow row;
  const auto id = text::parse_int(f[0]);
  if (!id || *id <= 0) throw RowParseError(rec.line, "bad region_id '" + f[0] + "'");
  row.region_id = *id;
  row.region_name = f[1];
  row.party = f[2];
  if (row.party.empty()) throw RowParseError(rec.line, "empty party");
  row.votes = count(f[3], "votes");
  row.vote_share_pct = share(f[4], "vote_share_pct");
  row.seats = count(f[5], "seats");
  row.seat_share_pct = share(f[6], "seat_share_pct");
  row.candidates = count(f[7], "candidates");
  if (f[8] == "true")
    row.is_winner = true;
  else if (f[8] == "false")
    row.is_winner = false;
  else
    throw RowParseError(rec.line, "bad is_winner '" + f[8] + "'");
  return row;
}

} // namespace

std::vector<ElectionResultRow> parse_election_csv(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);
  const auto line_end = content.find_first_of("\r\n");
  const auto header = content.substr(0, line_end);
  if (header != kCsvHeader) throw Error(Errc::HeaderMismatch, "got '" + std::string(header) + "'");
  const auto records = split_records(content);
  std::vector<ElectionResultRow> rows;
  rows.reserve(records.size() > 0 ? records.size() - 1 : 0);
  for (std::size_t r = 1; r < records.size(); ++r) rows.push_back(parse_row(records[r]));
  return rows;
}

std::vector<ElectionResultRow> read_election_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_election_csv(ss.str());
  } catch (const RowParseError& e) {
    throw RowParseError(e.line(), path.string() + ": " + e.detail());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

// ---------------------------------------------------------------------------

const CatalogEntry* ElectionCatalog::find(ElectionType type, int year, RegionLevel level) const {
  for (const auto& e : entries)
    if (e.type == type && e.year == year && e.level == level) return &e;
  return nullptr;
}

const CatalogEntry* ElectionCatalog::find_preferred(ElectionType type, int year) const {
  if (const auto* e = find(type, year, RegionLevel::Province)) return e;
  return find(type, year, RegionLevel::CensusDivision);
}

ElectionCatalog build_catalog(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(Errc::IoError, root.string() + " is not a directory");
  static const std::regex pattern(R"(^(federal|provincial)_(\d{4})(_cd)?\.csv$)",
                                  std::regex::icase);
  ElectionCatalog catalog;
  fs::directory_iterator it(root, ec);
  if (ec) throw Error(Errc::IoError, "cannot list " + root.string() + ": " + ec.message());
  for (const auto& dirent : it) {
    if (!dirent.is_regular_file()) continue;
    const std::string name = dirent.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) {
      warn("ignoring " + dirent.path().string() + ": not <type>_<year>[_cd].csv");
      continue;
    }
    CatalogEntry entry;
    entry.type = *parse_election_type(m[1].str());
    entry.year = std::stoi(m[2].str());
    entry.level = m[3].matched ? RegionLevel::CensusDivision : RegionLevel::Province;
    entry.path = dirent.path();
    entry.row_count = read_election_csv(entry.path).size();
    catalog.entries.push_back(std::move(entry));
  }
  auto key = [](const CatalogEntry& e) { return std::tuple(e.type, e.year, e.level); };
  std::sort(catalog.entries.begin(), catalog.entries.end(),
            [&](const CatalogEntry& a, const CatalogEntry& b) {
              if (key(a) != key(b)) return key(a) < key(b);
              return a.path < b.path;
            });
  for (std::size_t i = 1; i < catalog.entries.size(); ++i) {
    const auto& a = catalog.entries[i - 1];
    const auto& b = catalog.entries[i];
    if (key(a) == key(b))
      throw Error(Errc::DuplicateCatalogEntry,
                  a.path.string() + " and " + b.path.string() + " name the same election");
  }
  return catalog;
}

std::vector<ElectionTable> load_catalog(const ElectionCatalog& catalog) {
  std::vector<ElectionTable> tables;
  tables.reserve(catalog.entries.size());
  for (const auto& entry : catalog.entries) tables.push_back({entry, read_election_csv(entry.path)});
  return tables;
}

} // namespace electmap
