#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace electmap {

enum class Errc {
  // ingest
  NoTableFound,
  MalformedDocument,
  MissingKeyColumn,
  BadRegionId,
  EmptyParty,
  RetriesExhausted,
  TransportError,
  // datastore
  IoError,
  RefusedEmpty,
  HeaderMismatch,
  RowParseError,
  DuplicateCatalogEntry,
  // geometry
  BadMagic,
  UnsupportedShapeType,
  RecordCountMismatch,
  FieldNotFound,
  UnsupportedFieldType,
  MalformedShapefile,
  DuplicateRegionId,
  JsonMalformed,
  MissingIdProperty,
  // join
  StrictJoinFailure,
  LevelMismatch,
  // render
  DuplicateOverrideColor,
  InvalidColor,
  EmptyInput,
  // analytics
  DegenerateX,
  TooFewPoints,
  InsufficientData,
  // service / config
  ConfigError,
  BindError,
  StartupValidationError,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  // Message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

private:
  Errc code_;
  std::string detail_;
};

class BadRegionIdError : public Error {
public:
  BadRegionIdError(std::size_t row, const std::string& cell);
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

class RowParseError : public Error {
public:
  RowParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class RetriesExhaustedError : public Error {
public:
  RetriesExhaustedError(std::string url, int attempts);
  const std::string& url() const noexcept { return url_; }
  int attempts() const noexcept { return attempts_; }

private:
  std::string url_;
  int attempts_;
};

class UnsupportedShapeTypeError : public Error {
public:
  explicit UnsupportedShapeTypeError(int shape_type);
  int shape_type() const noexcept { return shape_type_; }

private:
  int shape_type_;
};

} // namespace electmap
