#pragma once

#include "electmap/geometry.hpp"
#include "electmap/ingest.hpp"
#include "electmap/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace electmap;

// Rows of the published province-level table, transcribed as printed.
struct ProvincialRow {
  RegionId pruid;
  const char* province;
  const char* party;
};
const std::vector<ProvincialRow>& provincial_2019_table();

std::filesystem::path fixture_dir();

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Independent ESRI writer: polygon .shp plus a dBASE III table with one N
// id field and one C name field. Rings are written exactly as given.
struct ShapeRecordSpec {
  RegionId id;
  std::string name;
  std::vector<Ring> rings;
};
struct ShapefileBytes {
  std::vector<std::uint8_t> shp;
  std::vector<std::uint8_t> dbf;
};
ShapefileBytes write_shapefile(const std::vector<ShapeRecordSpec>& records,
                               const std::string& id_field = "PRUID",
                               const std::string& name_field = "PRNAME");

// Clockwise (ESRI outer) regular polygon, closed, `sides` distinct vertices.
Ring polygon_ring(double cx, double cy, double radius, int sides, bool clockwise = true);

// One region per provincial 2019 row on a 5-wide grid. Region 24 carries a hole and
// region 62 has two parts.
std::vector<ShapeRecordSpec> provincial_2019_shapes();
FeatureSet provincial_2019_geometry();

// Transport that replays a scripted status per call and records timeouts.
class ScriptedTransport : public Transport {
public:
  explicit ScriptedTransport(std::vector<FetchStatus> script, std::string body = "<ok/>")
      : script_(std::move(script)), body_(std::move(body)) {}

  FetchResponse get(const std::string& url, Millis timeout) override;

  std::vector<Millis> timeouts;
  std::vector<std::string> urls;

private:
  std::vector<FetchStatus> script_;
  std::string body_;
  std::size_t next_ = 0;
};

// Provincial 2019 rows as rows_from_table yields it: id, printed name, party.
std::vector<ElectionResultRow> provincial_2019_rows();

// Valid rows with awkward text (quotes, commas, accents, line breaks) and
// randomly absent optional fields.
std::vector<ElectionResultRow> random_rows(std::mt19937_64& rng, std::size_t max_rows);

// A data directory holding provincial_2019 (the published 13-region table), federal_1867 and
// federal_1963, a province geometry file and a service config. Returns the
// config path.
std::filesystem::path write_service_fixture(const std::filesystem::path& dir);

// Federal fixture totals: candidates per year and national winners.
inline constexpr double kFederal1867Candidates = 273;
inline constexpr double kFederal1963Candidates = 512;

} // namespace testsupport
