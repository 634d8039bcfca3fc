#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"
#include "electmap/ingest.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <array>

namespace electmap {

std::string_view to_string(TableKind kind) noexcept {
  switch (kind) {
  case TableKind::ProvinceLevel: return "province";
  case TableKind::DistrictLevel: return "district";
  case TableKind::PartySummary: return "party_summary";
  }
  return "province";
}

std::optional<TableKind> parse_table_kind(std::string_view text) noexcept {
  if (text::iequals(text, "province")) return TableKind::ProvinceLevel;
  if (text::iequals(text, "district")) return TableKind::DistrictLevel;
  if (text::iequals(text, "party_summary")) return TableKind::PartySummary;
  return std::nullopt;
}

namespace {

std::string json_cell(const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return text::format_double(v.get<double>());
  return v.dump();
}

} // namespace

RawTable table_from_json(std::string_view json_text, TableKind kind,
                         const JsonTableMapping& mapping) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("json fragment: ") + e.what());
  }
  const nlohmann::json* rows = &doc;
  if (!mapping.rows_key.empty()) {
    if (!doc.is_object() || !doc.contains(mapping.rows_key))
      throw Error(Errc::NoTableFound, "json fragment has no '" + mapping.rows_key + "'");
    rows = &doc[mapping.rows_key];
  }
  if (!rows->is_array()) throw Error(Errc::NoTableFound, "json fragment rows are not an array");

  RawTable table;
  table.kind = kind;
  for (const auto& [column, key] : mapping.columns) table.header.push_back(column);
  for (const auto& item : *rows) {
    if (!item.is_object()) throw Error(Errc::MalformedDocument, "json row is not an object");
    std::vector<std::string> cells;
    cells.reserve(mapping.columns.size());
    for (const auto& [column, key] : mapping.columns) {
      auto it = item.find(key);
      cells.push_back(it == item.end() ? std::string{} : json_cell(*it));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace {

constexpr std::array<std::string_view, 6> kIdColumns{"pruid", "prid", "cduid", "id", "region_id",
                                                     "fedid"};
constexpr std::array<std::string_view, 10> kNameColumns{
    "province", "region",        "region_name", "district", "census division",
    "prname",   "cdname",        "name",        "riding",   "electoral district"};
constexpr std::array<std::string_view, 2> kPartyColumns{"party", "party name"};
constexpr std::array<std::string_view, 3> kVoteColumns{"votes", "vote", "votes won"};
constexpr std::array<std::string_view, 6> kVoteShareColumns{"vote %", "votes %", "vote share",
                                                            "vote_share_pct", "% votes", "% of votes"};
constexpr std::array<std::string_view, 3> kSeatColumns{"seats", "seats won", "seat"};
constexpr std::array<std::string_view, 6> kSeatShareColumns{"seat %", "seats %", "seat share",
                                                            "seat_share_pct", "% seats", "% of seats"};
constexpr std::array<std::string_view, 3> kCandidateColumns{"candidates", "candidate count",
                                                            "# candidates"};
constexpr std::array<std::string_view, 4> kWinnerColumns{"winner", "elected", "is_winner", "won"};

template <std::size_t N>
std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto cell = text::collapse_whitespace(header[i]);
    for (auto name : names)
      if (text::iequals(cell, name)) return i;
  }
  return std::nullopt;
}

std::string strip_number(std::string_view cell) {
  std::string out;
  for (char c : text::trim(cell))
    if (c != ',' && c != ' ' && c != '%') out.push_back(c);
  return out;
}

std::optional<std::int64_t> count_cell(std::string_view cell) {
  auto v = text::parse_int(strip_number(cell));
  if (v && *v < 0) return std::nullopt;
  return v;
}

std::optional<double> share_cell(std::string_view cell, std::size_t row, std::string_view column) {
  auto v = text::parse_double(strip_number(cell));
  if (v && (*v < 0.0 || *v > 100.0)) {
    warn("row " + std::to_string(row) + ": " + std::string(column) + " " + std::string(cell) +
         " outside [0,100], treated as absent");
    return std::nullopt;
  }
  return v;
}

bool winner_cell(std::string_view cell) {
  const auto t = text::to_lower(text::trim(cell));
  return t == "true" || t == "yes" || t == "y" || t == "1" || t == "x" || t == "*" ||
         t == "elected" || t == "winner" || t == "\xE2\x9C\x93";
}

} // namespace

std::vector<ElectionResultRow> rows_from_table(const RawTable& table) {
  if (table.kind == TableKind::PartySummary)
    throw Error(Errc::InvalidArgument, "party summary tables carry no region key");
  const auto id_col = find_column(table.header, kIdColumns);
  if (!id_col) throw Error(Errc::MissingKeyColumn, "no numeric region id column in header");
  const auto party_col = find_column(table.header, kPartyColumns);
  if (!party_col) throw Error(Errc::MissingKeyColumn, "no party column in header");
  const auto name_col = find_column(table.header, kNameColumns);
  const auto votes_col = find_column(table.header, kVoteColumns);
  const auto vshare_col = find_column(table.header, kVoteShareColumns);
  const auto seats_col = find_column(table.header, kSeatColumns);
  const auto sshare_col = find_column(table.header, kSeatShareColumns);
  const auto cand_col = find_column(table.header, kCandidateColumns);
  const auto winner_col = find_column(table.header, kWinnerColumns);

  std::vector<ElectionResultRow> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    auto cell = [&](std::optional<std::size_t> col) -> std::string_view {
      if (!col || *col >= cells.size()) return {};
      return cells[*col];
    };
    ElectionResultRow row;
    const auto id = text::parse_int(cell(id_col));
    if (!id || *id <= 0) throw BadRegionIdError(r, std::string(cell(id_col)));
    row.region_id = *id;
    row.region_name = text::collapse_whitespace(cell(name_col));
    row.party = text::collapse_whitespace(cell(party_col));
    if (row.party.empty())
      throw Error(Errc::EmptyParty, "row " + std::to_string(r) + " has an empty party cell");
    row.votes = count_cell(cell(votes_col));
    row.vote_share_pct = share_cell(cell(vshare_col), r, "vote share");
    row.seats = count_cell(cell(seats_col));
    row.seat_share_pct = share_cell(cell(sshare_col), r, "seat share");
    row.candidates = count_cell(cell(cand_col));
    row.is_winner = winner_cell(cell(winner_col));
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace electmap
