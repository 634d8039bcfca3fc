#pragma once

#include "electmap/datastore.hpp"
#include "electmap/geometry.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace electmap {

struct ServiceConfig {
  std::filesystem::path data_root;
  std::map<RegionLevel, std::filesystem::path> geometry_paths;
  std::string bind_host = "127.0.0.1";
  int bind_port = 8080;
  std::optional<std::filesystem::path> palette_overrides;

  // Relative paths resolve against `base_dir`.
  static ServiceConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& path);

  // Every configured path must exist.
  void validate() const;
};

// Overrides `config_path` with $ELECTMAP_CONFIG when set.
std::filesystem::path resolve_config_path(const std::filesystem::path& config_path);

// Immutable state every request reads from.
struct Snapshot {
  std::uint64_t version = 0;
  ElectionCatalog catalog;
  std::vector<ElectionTable> tables;
  std::map<RegionLevel, FeatureSet> geometry;
  std::map<std::string, std::string> color_overrides;

  const ElectionTable* find(ElectionType type, int year, std::optional<RegionLevel> level) const;
};

std::shared_ptr<const Snapshot> load_snapshot(const ServiceConfig& config, std::uint64_t version);

struct HttpRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string if_none_match;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// Read-only endpoints. The result depends only on (snapshot, request).
HttpResponse handle_request(const Snapshot& snapshot, const HttpRequest& request);

class Service {
public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::shared_ptr<const Snapshot> snapshot() const;

  // Loads a fresh snapshot and swaps it in; the old one stays live on failure.
  std::uint64_t reload();

  // GET endpoints plus POST /api/reload.
  HttpResponse handle(const HttpRequest& request);

  // Binds the configured address (port 0 picks a free one) and returns the port.
  int bind();
  // Blocks until stop(); bind() first.
  void listen();
  void stop();

private:
  ServiceConfig config_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::mutex reload_mutex_;
  std::unique_ptr<httplib::Server> server_;
};

} // namespace electmap
