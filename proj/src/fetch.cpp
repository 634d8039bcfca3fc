#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"
#include "electmap/ingest.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace electmap {

void FetchPolicy::validate() const {
  if (base_timeout <= Millis::zero() || timeout_increment <= Millis::zero() ||
      max_timeout <= Millis::zero() || politeness_delay <= Millis::zero())
    throw Error(Errc::InvalidArgument, "fetch policy durations must be positive");
  if (base_timeout > max_timeout)
    throw Error(Errc::InvalidArgument, "base_timeout exceeds max_timeout");
  if (max_attempts < 1) throw Error(Errc::InvalidArgument, "max_attempts must be at least 1");
}

Millis FetchPolicy::timeout_for_attempt(int attempt) const {
  const auto grown = base_timeout + timeout_increment * (std::max(attempt, 1) - 1);
  return std::min(grown, max_timeout);
}

std::string host_of(std::string_view url) {
  auto scheme = url.find("://");
  std::string_view rest = scheme == std::string_view::npos ? url : url.substr(scheme + 3);
  const auto end = rest.find_first_of("/?#");
  return text::to_lower(end == std::string_view::npos ? rest : rest.substr(0, end));
}

HostThrottle::HostThrottle(Sleeper sleeper) : sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](Clock::duration d) { std::this_thread::sleep_for(d); };
}

HostThrottle::HostSlot& HostThrottle::slot(const std::string& host) {
  std::lock_guard lock(map_mutex_);
  auto& entry = slots_[host];
  if (!entry) entry = std::make_unique<HostSlot>();
  return *entry;
}

FetchResponse HostThrottle::run(const std::string& host, Millis delay,
                                const std::function<FetchResponse()>& request) {
  HostSlot& s = slot(host);
  std::lock_guard lock(s.mutex);
  if (s.last) {
    const auto ready = *s.last + delay;
    const auto now = Clock::now();
    if (ready > now) sleeper_(ready - now);
  }
  auto response = request();
  s.last = Clock::now();
  return response;
}

std::string fetch_with_retry(const std::string& url, const FetchPolicy& policy,
                             Transport& transport, HostThrottle* throttle) {
  policy.validate();
  const std::string host = host_of(url);
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    const Millis timeout = policy.timeout_for_attempt(attempt);
    auto request = [&] { return transport.get(url, timeout); };
    const FetchResponse response = (throttle && transport.is_live())
                                       ? throttle->run(host, policy.politeness_delay, request)
                                       : request();
    switch (response.status) {
    case FetchStatus::Ok: return response.body;
    case FetchStatus::Timeout: continue;
    case FetchStatus::Failed:
      throw Error(Errc::TransportError, url + ": " + response.detail);
    }
  }
  throw RetriesExhaustedError(url, policy.max_attempts);
}

// ---------------------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

FixtureTransport::FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto index_path = dir_ / "index.json";
  try {
    const auto index = nlohmann::json::parse(read_file(index_path));
    for (const auto& [url, file] : index.items()) index_[url] = file.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, index_path.string() + ": " + e.what());
  }
}

FetchResponse FixtureTransport::get(const std::string& url, Millis) {
  const auto it = index_.find(url);
  if (it == index_.end()) return {FetchStatus::Failed, {}, "no fixture recorded for URL"};
  try {
    return {FetchStatus::Ok, read_file(dir_ / it->second), {}};
  } catch (const Error& e) {
    return {FetchStatus::Failed, {}, e.what()};
  }
}

// ---------------------------------------------------------------------------

std::string expand_url_template(std::string_view url_template, ElectionType type, int year) {
  std::string out;
  std::size_t i = 0;
  while (i < url_template.size()) {
    if (url_template.substr(i).starts_with("{type}")) {
      out += to_string(type);
      i += 6;
    } else if (url_template.substr(i).starts_with("{year}")) {
      out += std::to_string(year);
      i += 6;
    } else {
      out.push_back(url_template[i++]);
    }
  }
  return out;
}

SiteConfig SiteConfig::parse(std::string_view json_text) {
  SiteConfig config;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (auto it = doc.find("selectors"); it != doc.end()) {
      for (const auto& [kind_name, sel] : it->items()) {
        const auto kind = parse_table_kind(kind_name);
        if (!kind) throw Error(Errc::ConfigError, "unknown table kind '" + kind_name + "'");
        TableSelector selector;
        selector.element = sel.value("element", std::string("table"));
        selector.id = sel.value("id", std::string());
        selector.class_name = sel.value("class", std::string());
        config.selectors[*kind] = selector;
      }
    }
    if (auto it = doc.find("json"); it != doc.end()) {
      config.json_mapping.rows_key = it->value("rows_key", std::string());
      for (const auto& col : it->value("columns", nlohmann::json::array()))
        config.json_mapping.columns.emplace_back(col.at("column").get<std::string>(),
                                                 col.at("key").get<std::string>());
    }
    for (const auto& src : doc.value("sources", nlohmann::json::array())) {
      PageSource page;
      const auto type = parse_election_type(src.at("type").get<std::string>());
      if (!type) throw Error(Errc::ConfigError, "unknown election type in source");
      page.type = *type;
      if (src.contains("year")) page.year = src.at("year").get<int>();
      const auto kind = parse_table_kind(src.value("kind", std::string("province")));
      if (!kind) throw Error(Errc::ConfigError, "unknown table kind in source");
      page.kind = *kind;
      const auto format = text::to_lower(src.value("format", std::string("html")));
      if (format == "html")
        page.format = PageFormat::Html;
      else if (format == "json")
        page.format = PageFormat::Json;
      else
        throw Error(Errc::ConfigError, "unknown page format '" + format + "'");
      for (const auto& url : src.at("urls")) page.url_templates.push_back(url.get<std::string>());
      config.sources.push_back(std::move(page));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("site config: ") + e.what());
  }
  return config;
}

SiteConfig SiteConfig::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::vector<std::pair<std::string, const PageSource*>> SiteConfig::urls_for(ElectionType type,
                                                                           int year) const {
  std::vector<std::pair<std::string, const PageSource*>> urls;
  for (const auto& source : sources) {
    if (source.type != type || (source.year && *source.year != year)) continue;
    for (const auto& tmpl : source.url_templates)
      urls.emplace_back(expand_url_template(tmpl, type, year), &source);
  }
  return urls;
}

namespace {

int current_year() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  return utc.tm_year + 1900;
}

} // namespace

std::vector<ElectionResultRow> scrape_election(ElectionType type, int year,
                                               const SiteConfig& source,
                                               const FetchPolicy& policy, Transport& transport,
                                               HostThrottle* throttle) {
  if (year < 1867 || year > current_year())
    throw Error(Errc::InvalidArgument, "election year " + std::to_string(year) + " out of range");
  policy.validate();
  HostThrottle local_throttle;
  if (!throttle) throttle = &local_throttle;

  std::vector<ElectionResultRow> rows;
  for (const auto& [url, page] : source.urls_for(type, year)) {
    try {
      const std::string body = fetch_with_retry(url, policy, transport, throttle);
      RawTable table;
      if (page->format == PageFormat::Html) {
        const auto sel = source.selectors.find(page->kind);
        table = parse_results_table(body, page->kind,
                                    sel == source.selectors.end() ? TableSelector{} : sel->second);
      } else {
        table = table_from_json(body, page->kind, source.json_mapping);
      }
      table.source_url = url;
      auto page_rows = rows_from_table(table);
      rows.insert(rows.end(), std::make_move_iterator(page_rows.begin()),
                  std::make_move_iterator(page_rows.end()));
    } catch (const RetriesExhaustedError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), url + ": " + e.detail());
    }
  }
  return rows;
}

} // namespace electmap
