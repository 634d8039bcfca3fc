#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"
#include "electmap/types.hpp"

#include "text_util.hpp"

#include <iostream>
#include <mutex>

namespace electmap {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
  case Errc::NoTableFound: return "NoTableFound";
  case Errc::MalformedDocument: return "MalformedDocument";
  case Errc::MissingKeyColumn: return "MissingKeyColumn";
  case Errc::BadRegionId: return "BadRegionId";
  case Errc::EmptyParty: return "EmptyParty";
  case Errc::RetriesExhausted: return "RetriesExhausted";
  case Errc::TransportError: return "TransportError";
  case Errc::IoError: return "IoError";
  case Errc::RefusedEmpty: return "RefusedEmpty";
  case Errc::HeaderMismatch: return "HeaderMismatch";
  case Errc::RowParseError: return "RowParseError";
  case Errc::DuplicateCatalogEntry: return "DuplicateCatalogEntry";
  case Errc::BadMagic: return "BadMagic";
  case Errc::UnsupportedShapeType: return "UnsupportedShapeType";
  case Errc::RecordCountMismatch: return "RecordCountMismatch";
  case Errc::FieldNotFound: return "FieldNotFound";
  case Errc::UnsupportedFieldType: return "UnsupportedFieldType";
  case Errc::MalformedShapefile: return "MalformedShapefile";
  case Errc::DuplicateRegionId: return "DuplicateRegionId";
  case Errc::JsonMalformed: return "JsonMalformed";
  case Errc::MissingIdProperty: return "MissingIdProperty";
  case Errc::StrictJoinFailure: return "StrictJoinFailure";
  case Errc::LevelMismatch: return "LevelMismatch";
  case Errc::DuplicateOverrideColor: return "DuplicateOverrideColor";
  case Errc::InvalidColor: return "InvalidColor";
  case Errc::EmptyInput: return "EmptyInput";
  case Errc::DegenerateX: return "DegenerateX";
  case Errc::TooFewPoints: return "TooFewPoints";
  case Errc::InsufficientData: return "InsufficientData";
  case Errc::ConfigError: return "ConfigError";
  case Errc::BindError: return "BindError";
  case Errc::StartupValidationError: return "StartupValidationError";
  case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code),
      detail_(message) {}

BadRegionIdError::BadRegionIdError(std::size_t row, const std::string& cell)
    : Error(Errc::BadRegionId, "row " + std::to_string(row) + ": '" + cell + "'"), row_(row) {}

RowParseError::RowParseError(std::size_t line, const std::string& what)
    : Error(Errc::RowParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

RetriesExhaustedError::RetriesExhaustedError(std::string url, int attempts)
    : Error(Errc::RetriesExhausted, url + " after " + std::to_string(attempts) + " attempts"),
      url_(std::move(url)), attempts_(attempts) {}

UnsupportedShapeTypeError::UnsupportedShapeTypeError(int shape_type)
    : Error(Errc::UnsupportedShapeType, "shape type " + std::to_string(shape_type)),
      shape_type_(shape_type) {}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_ref() {
  static WarningSink sink;
  return sink;
}

} // namespace

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (auto& sink = sink_ref())
    sink(message);
  else
    std::cerr << "warning: " << message << '\n';
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  auto previous = std::move(sink_ref());
  sink_ref() = std::move(sink);
  return previous;
}

std::string_view to_string(ElectionType type) noexcept {
  return type == ElectionType::Federal ? "federal" : "provincial";
}

std::string_view to_string(RegionLevel level) noexcept {
  return level == RegionLevel::Province ? "province" : "census_division";
}

std::optional<ElectionType> parse_election_type(std::string_view text) noexcept {
  if (text::iequals(text, "federal")) return ElectionType::Federal;
  if (text::iequals(text, "provincial")) return ElectionType::Provincial;
  return std::nullopt;
}

std::optional<RegionLevel> parse_region_level(std::string_view text) noexcept {
  if (text::iequals(text, "province")) return RegionLevel::Province;
  if (text::iequals(text, "cd") || text::iequals(text, "census_division"))
    return RegionLevel::CensusDivision;
  return std::nullopt;
}

} // namespace electmap
