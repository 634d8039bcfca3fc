#pragma once

#include "electmap/types.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace electmap {

using Millis = std::chrono::milliseconds;

// Linear backoff: attempt k waits min(base + (k-1)*increment, max). The
// schedule restarts at base for every URL.
struct FetchPolicy {
  Millis base_timeout{5000};
  Millis timeout_increment{5000};
  Millis max_timeout{30000};
  int max_attempts = 5;
  Millis politeness_delay{500};

  // Throws Errc::InvalidArgument when an invariant is violated.
  void validate() const;
  Millis timeout_for_attempt(int attempt) const;
};

enum class TableKind { ProvinceLevel, DistrictLevel, PartySummary };

std::string_view to_string(TableKind kind) noexcept;
std::optional<TableKind> parse_table_kind(std::string_view text) noexcept;

struct RawTable {
  TableKind kind = TableKind::ProvinceLevel;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string source_url;

  friend bool operator==(const RawTable&, const RawTable&) = default;
};

// Matches an element by tag name plus optional id and class token.
struct TableSelector {
  std::string element = "table";
  std::string id;
  std::string class_name;
};

// First table matching `selector`. Header comes from <thead> or the first row
// holding <th> cells, otherwise the first row. Ragged rows are padded or
// truncated to the header width with a warning.
RawTable parse_results_table(std::string_view document, TableKind kind,
                             const TableSelector& selector = {});

// Maps a JSON fragment (array of objects, or an object holding one under
// `rows_key`) to table columns. Each column pairs a header name with the JSON
// key that feeds it.
struct JsonTableMapping {
  std::string rows_key;
  std::vector<std::pair<std::string, std::string>> columns;
};

RawTable table_from_json(std::string_view json_text, TableKind kind,
                         const JsonTableMapping& mapping);

std::vector<ElectionResultRow> rows_from_table(const RawTable& table);

// ---------------------------------------------------------------------------
// Transport

enum class FetchStatus { Ok, Timeout, Failed };

struct FetchResponse {
  FetchStatus status = FetchStatus::Failed;
  std::string body;
  std::string detail;
};

class Transport {
public:
  virtual ~Transport() = default;
  virtual FetchResponse get(const std::string& url, Millis timeout) = 0;
  // Live transports are throttled by politeness_delay.
  virtual bool is_live() const { return false; }
};

// Replays recorded pages. `dir/index.json` maps URL -> file name relative to
// `dir`. Unknown URLs fail without retry.
class FixtureTransport : public Transport {
public:
  explicit FixtureTransport(std::filesystem::path dir);
  FetchResponse get(const std::string& url, Millis timeout) override;

private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> index_;
};

// Plain http:// GET via cpp-httplib.
class HttpTransport : public Transport {
public:
  FetchResponse get(const std::string& url, Millis timeout) override;
  bool is_live() const override { return true; }
};

// Serializes requests per host and spaces them by a minimum delay.
class HostThrottle {
public:
  using Clock = std::chrono::steady_clock;
  using Sleeper = std::function<void(Clock::duration)>;

  explicit HostThrottle(Sleeper sleeper = {});

  // Runs `request` while holding the host's slot.
  FetchResponse run(const std::string& host, Millis delay,
                    const std::function<FetchResponse()>& request);

private:
  struct HostSlot {
    std::mutex mutex;
    std::optional<Clock::time_point> last;
  };
  HostSlot& slot(const std::string& host);

  Sleeper sleeper_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<HostSlot>> slots_;
};

std::string host_of(std::string_view url);

// Timeouts retry with a growing timeout; any other failure throws
// Errc::TransportError immediately.
std::string fetch_with_retry(const std::string& url, const FetchPolicy& policy,
                             Transport& transport, HostThrottle* throttle = nullptr);

// ---------------------------------------------------------------------------
// Site configuration and scraping

enum class PageFormat { Html, Json };

struct PageSource {
  ElectionType type = ElectionType::Federal;
  std::optional<int> year; // absent: applies to every year
  TableKind kind = TableKind::ProvinceLevel;
  PageFormat format = PageFormat::Html;
  // May contain {type} and {year} placeholders.
  std::vector<std::string> url_templates;
};

struct SiteConfig {
  std::map<TableKind, TableSelector> selectors;
  JsonTableMapping json_mapping;
  std::vector<PageSource> sources;

  static SiteConfig parse(std::string_view json_text);
  static SiteConfig load(const std::filesystem::path& path);

  // Expanded URLs for one election, in configuration order.
  std::vector<std::pair<std::string, const PageSource*>> urls_for(ElectionType type,
                                                                   int year) const;
};

std::string expand_url_template(std::string_view url_template, ElectionType type, int year);

std::vector<ElectionResultRow> scrape_election(ElectionType type, int year,
                                               const SiteConfig& source,
                                               const FetchPolicy& policy, Transport& transport,
                                               HostThrottle* throttle = nullptr);

} // namespace electmap
