#include "support.hpp"

#include "electmap/datastore.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace testsupport {

const std::vector<ProvincialRow>& provincial_2019_table() {
  static const std::vector<ProvincialRow> rows = {
      {48, "Alberta (Apr 16, '19)", "United Conservative Party"},
      {59, "British Columbia (May 9, '17)", "British Columbia Liberal Party"},
      {46, "Manitoba (Apr 19, '16)", "Progressive Conservative Party of Manitoba"},
      {13, "New Brunswick (Sep 24, '18)", "Progressive Conservative Party of New Brunswick"},
      {10, "Newfoundland and Labrador (May 16, '19)", "Liberal Party of Newfoundland and Labrador"},
      {12, "Nova Scotia (May 30, '17)", "Nova Scotia Liberal Party"},
      {62, "Nunavut (Oct 30, '17)", "Nunavut Independent"},
      {61, "Northwest Territories (Oct 3, '11)", "Sans Nom/ No Name"},
      {35, "Ontario (Jun 7, '18)", "Progressive Conservative Party of Ontario"},
      {11, "Prince Edward Island (Apr 23, '19)", "Progressive Conservative Party of Prince Edward Island"},
      {24, "Quebec (Oct 1, '18)", "Coalition Avenir Québec - L'équipe François Legault"},
      {47, "Saskatchewan (Apr 4, '16)", "Saskatchewan Party"},
      {60, "Yukon (Oct 1, '11)", "Yukon Party"},
  };
  return rows;
}

std::filesystem::path fixture_dir() { return ELECTMAP_FIXTURE_DIR; }

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = std::filesystem::temp_directory_path() /
                     ("electmap-test-" + std::to_string(rng() % 1000000000));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// ESRI writer

namespace {

struct Bytes {
  std::vector<std::uint8_t> v;

  void be32(std::int32_t x) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int s = 24; s >= 0; s -= 8) v.push_back(static_cast<std::uint8_t>(u >> s));
  }
  void le32(std::int32_t x) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int s = 0; s < 32; s += 8) v.push_back(static_cast<std::uint8_t>(u >> s));
  }
  void le16(std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
  }
  void led(double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    for (int s = 0; s < 64; s += 8) v.push_back(static_cast<std::uint8_t>(u >> s));
  }
  void put_be32(std::size_t at, std::int32_t x) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int i = 0; i < 4; ++i) v[at + i] = static_cast<std::uint8_t>(u >> (24 - 8 * i));
  }
  void text(const std::string& s, std::size_t width, bool right_align = false) {
    std::string cell = s.substr(0, width);
    const std::string pad(width - cell.size(), ' ');
    cell = right_align ? pad + cell : cell + pad;
    v.insert(v.end(), cell.begin(), cell.end());
  }
};

struct Box {
  double xmin = HUGE_VAL, ymin = HUGE_VAL, xmax = -HUGE_VAL, ymax = -HUGE_VAL;
  void add(const Point& p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  void write(Bytes& b) const {
    b.led(xmin);
    b.led(ymin);
    b.led(xmax);
    b.led(ymax);
  }
};

void field_descriptor(Bytes& b, const std::string& name, char type, std::uint8_t length) {
  std::string n = name.substr(0, 10);
  n.resize(11, '\0');
  b.v.insert(b.v.end(), n.begin(), n.end());
  b.v.push_back(static_cast<std::uint8_t>(type));
  b.v.insert(b.v.end(), 4, 0);
  b.v.push_back(length);
  b.v.push_back(0);
  b.v.insert(b.v.end(), 14, 0);
}

} // namespace

ShapefileBytes write_shapefile(const std::vector<ShapeRecordSpec>& records,
                               const std::string& id_field, const std::string& name_field) {
  Bytes shp;
  Box file_box;
  for (const auto& r : records)
    for (const auto& ring : r.rings)
      for (const auto& p : ring) file_box.add(p);

  shp.be32(9994);
  for (int i = 0; i < 5; ++i) shp.be32(0);
  shp.be32(0); // file length, patched below
  shp.le32(1000);
  shp.le32(5);
  file_box.write(shp);
  for (int i = 0; i < 4; ++i) shp.led(0.0);

  int number = 1;
  for (const auto& r : records) {
    Box box;
    std::int32_t points = 0;
    for (const auto& ring : r.rings) {
      for (const auto& p : ring) box.add(p);
      points += static_cast<std::int32_t>(ring.size());
    }
    const auto parts = static_cast<std::int32_t>(r.rings.size());
    const std::int32_t content_bytes = 44 + 4 * parts + 16 * points;
    shp.be32(number++);
    shp.be32(content_bytes / 2);
    shp.le32(5);
    box.write(shp);
    shp.le32(parts);
    shp.le32(points);
    std::int32_t start = 0;
    for (const auto& ring : r.rings) {
      shp.le32(start);
      start += static_cast<std::int32_t>(ring.size());
    }
    for (const auto& ring : r.rings)
      for (const auto& p : ring) {
        shp.led(p.x);
        shp.led(p.y);
      }
  }
  shp.put_be32(24, static_cast<std::int32_t>(shp.v.size() / 2));

  constexpr std::uint8_t id_len = 9, name_len = 80;
  Bytes dbf;
  dbf.v.push_back(0x03);
  dbf.v.push_back(124);
  dbf.v.push_back(1);
  dbf.v.push_back(1);
  dbf.le32(static_cast<std::int32_t>(records.size()));
  dbf.le16(32 + 2 * 32 + 1);
  dbf.le16(1 + id_len + name_len);
  dbf.v.insert(dbf.v.end(), 20, 0);
  field_descriptor(dbf, id_field, 'N', id_len);
  field_descriptor(dbf, name_field, 'C', name_len);
  dbf.v.push_back(0x0D);
  for (const auto& r : records) {
    dbf.v.push_back(' ');
    dbf.text(std::to_string(r.id), id_len, true);
    dbf.text(r.name, name_len);
  }
  dbf.v.push_back(0x1A);
  return {std::move(shp.v), std::move(dbf.v)};
}

Ring polygon_ring(double cx, double cy, double radius, int sides, bool clockwise) {
  constexpr double pi = 3.14159265358979323846;
  auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
  Ring ring;
  for (int k = 0; k < sides; ++k) {
    const double a = (clockwise ? -1.0 : 1.0) * 2 * pi * k / sides;
    ring.push_back({round6(cx + radius * std::cos(a)), round6(cy + radius * std::sin(a))});
  }
  ring.push_back(ring.front());
  return ring;
}

namespace {

Ring octagon(double cx, double cy) {
  return {{cx - 0.75, cy + 1.5}, {cx + 0.75, cy + 1.5}, {cx + 1.5, cy + 0.75},
          {cx + 1.5, cy - 0.75}, {cx + 0.75, cy - 1.5}, {cx - 0.75, cy - 1.5},
          {cx - 1.5, cy - 0.75}, {cx - 1.5, cy + 0.75}, {cx - 0.75, cy + 1.5}};
}

Ring square(double x0, double y0, double x1, double y1, bool clockwise) {
  if (clockwise) return {{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}, {x0, y0}};
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
}

} // namespace

std::vector<ShapeRecordSpec> provincial_2019_shapes() {
  std::vector<ShapeRecordSpec> out;
  int i = 0;
  for (const auto& row : provincial_2019_table()) {
    const double cx = -136.0 + 4.0 * (i % 5);
    const double cy = 70.0 - 4.0 * (i / 5);
    ShapeRecordSpec rec{row.pruid, std::string(row.province).substr(0, std::string(row.province).find(" (")), {octagon(cx, cy)}};
    if (row.pruid == 24) rec.rings.push_back(square(cx - 0.5, cy - 0.5, cx + 0.5, cy + 0.5, false));
    if (row.pruid == 62) rec.rings.push_back(square(cx + 1.75, cy + 1.75, cx + 2.25, cy + 2.25, true));
    out.push_back(std::move(rec));
    ++i;
  }
  return out;
}

FeatureSet provincial_2019_geometry() {
  FeatureSet fs;
  fs.level = RegionLevel::Province;
  for (auto& rec : provincial_2019_shapes()) {
    RegionFeature f;
    f.region_id = rec.id;
    f.region_name = rec.name;
    if (rec.id == 62) {
      f.polygons = {{rec.rings[0]}, {rec.rings[1]}};
    } else {
      f.polygons = {rec.rings};
    }
    f.bbox = compute_bbox(f);
    fs.features.push_back(std::move(f));
  }
  return fs;
}

std::vector<ElectionResultRow> provincial_2019_rows() {
  std::vector<ElectionResultRow> rows;
  for (const auto& r : provincial_2019_table()) {
    ElectionResultRow row;
    row.region_id = r.pruid;
    row.region_name = r.province;
    row.party = r.party;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string random_text(std::mt19937_64& rng, bool allow_empty) {
  static const std::vector<std::string> pieces = {
      "Alberta", " ", ",", "\"", "Québec", "L'équipe", "François", "Nord-Ouest", "\r\n",
      "Sans Nom/ No Name", "Île", "Ñ", "ü", "(Apr 16, '19)", "\"quoted\"", "a,b", "\n", "東京",
      "Party", "  ", "x"};
  std::uniform_int_distribution<std::size_t> count(allow_empty ? 0 : 1, 5);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string out;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) out += pieces[pick(rng)];
  return out;
}

} // namespace

std::vector<ElectionResultRow> random_rows(std::mt19937_64& rng, std::size_t max_rows) {
  std::uniform_int_distribution<std::size_t> row_count(0, max_rows);
  std::uniform_int_distribution<RegionId> id(1, 9999999);
  std::uniform_int_distribution<std::int64_t> big(0, 50'000'000);
  std::uniform_int_distribution<std::int64_t> small(0, 400);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  std::bernoulli_distribution present(0.7);
  std::bernoulli_distribution coin(0.5);
  std::vector<ElectionResultRow> rows(row_count(rng));
  for (auto& r : rows) {
    r.region_id = id(rng);
    r.region_name = random_text(rng, true);
    r.party = random_text(rng, false);
    if (present(rng)) r.votes = big(rng);
    if (present(rng)) r.vote_share_pct = coin(rng) ? pct(rng) : std::round(pct(rng) * 10) / 10;
    if (present(rng)) r.seats = small(rng);
    if (present(rng)) r.seat_share_pct = coin(rng) ? 100.0 : pct(rng);
    if (present(rng)) r.candidates = small(rng);
    r.is_winner = coin(rng);
  }
  return rows;
}

namespace {

ElectionResultRow federal_row(RegionId id, const char* name, const char* party, std::int64_t votes,
                              std::int64_t seats, std::int64_t candidates) {
  ElectionResultRow r;
  r.region_id = id;
  r.region_name = name;
  r.party = party;
  r.votes = votes;
  r.seats = seats;
  r.candidates = candidates;
  return r;
}

} // namespace

std::filesystem::path write_service_fixture(const std::filesystem::path& dir) {
  const auto data = dir / "data";
  write_election_csv(provincial_2019_rows(), ElectionType::Provincial, 2019, RegionLevel::Province, data);

  const std::vector<ElectionResultRow> y1867 = {
      federal_row(35, "Ontario", "Liberal-Conservative", 30000, 50, 60),
      federal_row(35, "Ontario", "Liberal", 28000, 32, 55),
      federal_row(24, "Quebec", "Liberal-Conservative", 25000, 45, 50),
      federal_row(24, "Quebec", "Liberal", 20000, 20, 40),
      federal_row(12, "Nova Scotia", "Anti-Confederation", 15000, 18, 19),
      federal_row(12, "Nova Scotia", "Liberal-Conservative", 9000, 1, 19),
      federal_row(13, "New Brunswick", "Liberal", 8000, 12, 15),
      federal_row(13, "New Brunswick", "Liberal-Conservative", 7000, 3, 15),
  };
  write_election_csv(y1867, ElectionType::Federal, 1867, RegionLevel::Province, data);

  const std::vector<ElectionResultRow> y1963 = {
      federal_row(35, "Ontario", "Liberal", 1200000, 52, 85),
      federal_row(35, "Ontario", "Progressive Conservative", 900000, 27, 85),
      federal_row(24, "Quebec", "Liberal", 1000000, 47, 75),
      federal_row(24, "Quebec", "Progressive Conservative", 400000, 8, 75),
      federal_row(24, "Quebec", "Social Credit", 500000, 20, 75),
      federal_row(48, "Alberta", "Progressive Conservative", 300000, 14, 17),
      federal_row(48, "Alberta", "Social Credit", 150000, 2, 17),
      federal_row(48, "Alberta", "Liberal", 120000, 1, 17),
      federal_row(59, "British Columbia", "Liberal", 250000, 7, 22),
      federal_row(59, "British Columbia", "New Democratic Party", 200000, 9, 22),
      federal_row(59, "British Columbia", "Progressive Conservative", 100000, 4, 22),
  };
  write_election_csv(y1963, ElectionType::Federal, 1963, RegionLevel::Province, data);

  write_file(dir / "provinces.geojson", to_geojson(provincial_2019_geometry()));
  write_file(dir / "colors.json", R"({"Yukon Party": "#ffd700"})");
  const auto config = dir / "svc.json";
  write_file(config, R"({
  "data_root": "data",
  "geometry": {"province": "provinces.geojson"},
  "bind": "127.0.0.1:0",
  "palette_overrides": "colors.json"
})");
  return config;
}

FetchResponse ScriptedTransport::get(const std::string& url, Millis timeout) {
  timeouts.push_back(timeout);
  urls.push_back(url);
  const FetchStatus status = next_ < script_.size() ? script_[next_] : FetchStatus::Ok;
  ++next_;
  if (status == FetchStatus::Ok) return {status, body_, {}};
  return {status, {}, status == FetchStatus::Timeout ? "timed out" : "connection refused"};
}

} // namespace testsupport
