#include "electmap/error.hpp"
#include "electmap/service.hpp"

#include <httplib.h>
#include <json.hpp>

namespace electmap {

Service::Service(ServiceConfig config)
    : config_(std::move(config)), snapshot_(load_snapshot(config_, 1)) {}

Service::~Service() { stop(); }

std::shared_ptr<const Snapshot> Service::snapshot() const { return std::atomic_load(&snapshot_); }

std::uint64_t Service::reload() {
  std::lock_guard lock(reload_mutex_);
  const auto next = load_snapshot(config_, snapshot()->version + 1);
  std::atomic_store(&snapshot_, next);
  return next->version;
}

HttpResponse Service::handle(const HttpRequest& request) {
  if (request.path == "/api/reload") {
    HttpResponse r;
    if (request.method != "POST") {
      r.status = 405;
      r.body = R"({"error":"method_not_allowed"})";
      return r;
    }
    try {
      r.body = nlohmann::json{{"version", reload()}}.dump();
    } catch (const Error& e) {
      r.status = 500;
      r.body = nlohmann::json{{"error", "reload_failed"}, {"detail", e.detail()}}.dump(
          -1, ' ', false, nlohmann::json::error_handler_t::replace);
    }
    return r;
  }
  return handle_request(*snapshot(), request);
}

namespace {

HttpRequest to_request(const httplib::Request& req) {
  HttpRequest out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [key, value] : req.params) out.query.emplace(key, value);
  out.if_none_match = req.get_header_value("If-None-Match");
  return out;
}

void write_response(const HttpResponse& in, httplib::Response& out) {
  out.status = in.status;
  for (const auto& [key, value] : in.headers) out.set_header(key, value);
  out.set_content(in.body, in.content_type);
}

} // namespace

int Service::bind() {
  server_ = std::make_unique<httplib::Server>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    write_response(handle(to_request(req)), res);
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  // The library default adds SO_REUSEPORT, which lets a second server share a
  // taken port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  int port = config_.bind_port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.bind_host);
  } else if (!server_->bind_to_port(config_.bind_host, port)) {
    port = -1;
  }
  if (port < 0)
    throw Error(Errc::BindError, "cannot bind " + config_.bind_host + ":" + std::to_string(config_.bind_port));
  return port;
}

void Service::listen() {
  if (!server_) bind();
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

} // namespace electmap
