#include "electmap/error.hpp"
#include "electmap/geometry.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace electmap {

namespace {

constexpr std::int32_t kFileCode = 9994;
constexpr std::int32_t kVersion = 1000;
constexpr std::int32_t kNullShape = 0;
constexpr std::int32_t kPolygon = 5;
constexpr std::size_t kMainHeaderSize = 100;

// Bounds-checked little/big-endian reads over a byte span.
class ByteReader {
public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::size_t size() const noexcept { return bytes_.size(); }

  void need(std::size_t offset, std::size_t count) const {
    if (offset > bytes_.size() || count > bytes_.size() - offset)
      throw Error(Errc::MalformedShapefile, std::string(what_) + " truncated at byte " +
                                                std::to_string(offset));
  }

  std::uint32_t u32le(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(bytes_[at]) | static_cast<std::uint32_t>(bytes_[at + 1]) << 8 |
           static_cast<std::uint32_t>(bytes_[at + 2]) << 16 |
           static_cast<std::uint32_t>(bytes_[at + 3]) << 24;
  }
  std::uint32_t u32be(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(bytes_[at]) << 24 |
           static_cast<std::uint32_t>(bytes_[at + 1]) << 16 |
           static_cast<std::uint32_t>(bytes_[at + 2]) << 8 | static_cast<std::uint32_t>(bytes_[at + 3]);
  }
  std::uint16_t u16le(std::size_t at) const {
    need(at, 2);
    return static_cast<std::uint16_t>(bytes_[at] | bytes_[at + 1] << 8);
  }
  std::int32_t i32le(std::size_t at) const { return static_cast<std::int32_t>(u32le(at)); }
  std::int32_t i32be(std::size_t at) const { return static_cast<std::int32_t>(u32be(at)); }
  double f64le(std::size_t at) const {
    need(at, 8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = bits << 8 | bytes_[at + static_cast<std::size_t>(i)];
    return std::bit_cast<double>(bits);
  }
  std::uint8_t u8(std::size_t at) const {
    need(at, 1);
    return bytes_[at];
  }
  std::string_view chars(std::size_t at, std::size_t count) const {
    need(at, count);
    return {reinterpret_cast<const char*>(bytes_.data() + at), count};
  }

private:
  std::span<const std::uint8_t> bytes_;
  const char* what_;
};

struct ShapeRecord {
  BBox bbox;
  std::vector<Ring> rings;
};

bool bbox_holds(const BBox& box, const Point& p) {
  const double tol = 1e-9 * std::max({1.0, std::abs(box.xmax - box.xmin), std::abs(box.ymax - box.ymin),
                                      std::abs(box.xmin), std::abs(box.ymin)});
  return p.x >= box.xmin - tol && p.x <= box.xmax + tol && p.y >= box.ymin - tol &&
         p.y <= box.ymax + tol;
}

std::vector<ShapeRecord> read_shp(const ByteReader& shp) {
  if (shp.size() < kMainHeaderSize)
    throw Error(Errc::BadMagic, "file is shorter than the 100-byte header");
  if (shp.i32be(0) != kFileCode)
    throw Error(Errc::BadMagic, "file code " + std::to_string(shp.i32be(0)) + ", expected 9994");
  if (shp.i32le(28) != kVersion)
    throw Error(Errc::BadMagic, "version " + std::to_string(shp.i32le(28)) + ", expected 1000");
  const std::int32_t file_type = shp.i32le(32);
  if (file_type != kPolygon) throw UnsupportedShapeTypeError(file_type);

  const std::size_t declared = static_cast<std::size_t>(shp.u32be(24)) * 2;
  const std::size_t end = std::min(declared, shp.size());

  std::vector<ShapeRecord> records;
  std::size_t offset = kMainHeaderSize;
  while (offset + 8 <= end) {
    const std::size_t content_len = static_cast<std::size_t>(shp.u32be(offset + 4)) * 2;
    const std::size_t content = offset + 8;
    shp.need(content, content_len);
    if (content_len < 4)
      throw Error(Errc::MalformedShapefile, "record at byte " + std::to_string(offset) + " is empty");
    const std::int32_t type = shp.i32le(content);
    if (type == kNullShape)
      throw Error(Errc::MalformedShapefile, "null shape in record " + std::to_string(records.size() + 1));
    if (type != kPolygon) throw UnsupportedShapeTypeError(type);
    if (content_len < 44)
      throw Error(Errc::MalformedShapefile, "polygon record shorter than its header");

    ShapeRecord rec;
    rec.bbox = {shp.f64le(content + 4), shp.f64le(content + 12), shp.f64le(content + 20),
                shp.f64le(content + 28)};
    if (!(rec.bbox.xmin <= rec.bbox.xmax && rec.bbox.ymin <= rec.bbox.ymax))
      throw Error(Errc::MalformedShapefile, "invalid record bbox");
    const std::int32_t num_parts = shp.i32le(content + 36);
    const std::int32_t num_points = shp.i32le(content + 40);
    if (num_parts < 1 || num_points < 4)
      throw Error(Errc::MalformedShapefile, "polygon with no rings");
    const auto parts = static_cast<std::size_t>(num_parts);
    const auto points = static_cast<std::size_t>(num_points);
    if (parts > content_len / 4 || points > content_len / 16 ||
        44 + 4 * parts + 16 * points > content_len)
      throw Error(Errc::MalformedShapefile, "part/point counts exceed record length");

    std::vector<std::size_t> starts(parts);
    for (std::size_t p = 0; p < parts; ++p) {
      const std::int32_t s = shp.i32le(content + 44 + 4 * p);
      if (s < 0 || static_cast<std::size_t>(s) >= points || (p == 0 && s != 0) ||
          (p > 0 && static_cast<std::size_t>(s) <= starts[p - 1]))
        throw Error(Errc::MalformedShapefile, "bad part index");
      starts[p] = static_cast<std::size_t>(s);
    }
    const std::size_t point_base = content + 44 + 4 * parts;
    for (std::size_t p = 0; p < parts; ++p) {
      const std::size_t from = starts[p];
      const std::size_t to = p + 1 < parts ? starts[p + 1] : points;
      Ring ring;
      ring.reserve(to - from);
      for (std::size_t k = from; k < to; ++k) {
        Point pt{shp.f64le(point_base + 16 * k), shp.f64le(point_base + 16 * k + 8)};
        if (!bbox_holds(rec.bbox, pt))
          throw Error(Errc::MalformedShapefile, "point outside record bbox");
        ring.push_back(pt);
      }
      if (!is_closed(ring))
        throw Error(Errc::MalformedShapefile, "ring is not closed or has fewer than 4 points");
      rec.rings.push_back(std::move(ring));
    }
    records.push_back(std::move(rec));
    offset = content + content_len;
  }
  return records;
}

struct DbfField {
  std::string name;
  char type = 'C';
  std::size_t offset = 0; // within the record, after the deletion flag
  std::size_t length = 0;
};

struct DbfTable {
  std::vector<DbfField> fields;
  std::size_t record_count = 0;
  std::size_t header_length = 0;
  std::size_t record_length = 0;
};

DbfTable read_dbf_header(const ByteReader& dbf) {
  if (dbf.size() < 33) throw Error(Errc::MalformedShapefile, "dbf shorter than its header");
  DbfTable table;
  table.record_count = dbf.u32le(4);
  table.header_length = dbf.u16le(8);
  table.record_length = dbf.u16le(10);
  if (table.header_length < 33 || table.header_length > dbf.size() || table.record_length < 1)
    throw Error(Errc::MalformedShapefile, "bad dbf header lengths");
  std::size_t field_offset = 1;
  for (std::size_t at = 32; at + 32 <= table.header_length; at += 32) {
    if (dbf.u8(at) == 0x0D) break;
    DbfField field;
    const auto raw = dbf.chars(at, 11);
    field.name = std::string(raw.substr(0, std::min(raw.find('\0'), raw.size())));
    field.type = static_cast<char>(dbf.u8(at + 11));
    field.length = dbf.u8(at + 16);
    field.offset = field_offset;
    field_offset += field.length;
    table.fields.push_back(std::move(field));
  }
  if (field_offset > table.record_length)
    throw Error(Errc::MalformedShapefile, "dbf fields exceed record length");
  const std::size_t body = dbf.size() - table.header_length;
  if (table.record_count > body / table.record_length)
    throw Error(Errc::MalformedShapefile, "dbf truncated");
  return table;
}

const DbfField& find_field(const DbfTable& table, std::string_view name) {
  auto same = [](std::string_view a, std::string_view b) { return text::iequals(a, b); };
  auto it = std::find_if(table.fields.begin(), table.fields.end(),
                         [&](const DbfField& f) { return same(f.name, name); });
  // PRID and PRUID name the same key.
  if (it == table.fields.end() && (same(name, "PRUID") || same(name, "PRID"))) {
    const std::string_view alt = same(name, "PRUID") ? "PRID" : "PRUID";
    it = std::find_if(table.fields.begin(), table.fields.end(),
                      [&](const DbfField& f) { return same(f.name, alt); });
  }
  if (it == table.fields.end()) throw Error(Errc::FieldNotFound, std::string(name));
  if (it->type != 'C' && it->type != 'N')
    throw Error(Errc::UnsupportedFieldType,
                std::string(name) + " has dBASE type '" + std::string(1, it->type) + "'");
  return *it;
}

std::string_view field_text(std::string_view cell) {
  return text::trim(cell.substr(0, std::min(cell.find('\0'), cell.size())));
}

RegionId parse_id(std::string_view cell, std::size_t record) {
  const auto trimmed = field_text(cell);
  if (auto v = text::parse_int(trimmed); v && *v > 0) return *v;
  if (auto d = text::parse_double(trimmed); d && *d > 0 && *d < 9.0e15 && std::floor(*d) == *d)
    return static_cast<RegionId>(*d);
  throw Error(Errc::MalformedShapefile,
              "record " + std::to_string(record) + " has region id '" + std::string(trimmed) + "'");
}

} // namespace

FeatureSet parse_shapefile(std::span<const std::uint8_t> shp_bytes,
                           std::span<const std::uint8_t> dbf_bytes, std::string_view id_field,
                           std::string_view name_field) {
  const ByteReader shp(shp_bytes, "shp");
  const ByteReader dbf(dbf_bytes, "dbf");
  auto shapes = read_shp(shp);
  const DbfTable table = read_dbf_header(dbf);
  if (table.record_count != shapes.size())
    throw Error(Errc::RecordCountMismatch, "shp has " + std::to_string(shapes.size()) +
                                               " records, dbf has " +
                                               std::to_string(table.record_count));
  const DbfField& id_col = find_field(table, id_field);
  const DbfField& name_col = find_field(table, name_field);

  FeatureSet out;
  out.level = text::iequals(id_field, "CDUID") ? RegionLevel::CensusDivision : RegionLevel::Province;
  std::set<RegionId> seen;
  for (std::size_t r = 0; r < shapes.size(); ++r) {
    const std::size_t base = table.header_length + r * table.record_length;
    RegionFeature feature;
    feature.region_id = parse_id(dbf.chars(base + id_col.offset, id_col.length), r + 1);
    if (!seen.insert(feature.region_id).second)
      throw Error(Errc::DuplicateRegionId, std::to_string(feature.region_id));
    feature.region_name =
        text::to_utf8(field_text(dbf.chars(base + name_col.offset, name_col.length)));
    feature.bbox = shapes[r].bbox;
    feature.polygons = group_rings(std::move(shapes[r].rings));
    out.features.push_back(std::move(feature));
  }
  return out;
}

} // namespace electmap
