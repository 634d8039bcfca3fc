#include "electmap/ingest.hpp"

#include <httplib.h>

namespace electmap {

FetchResponse HttpTransport::get(const std::string& url, Millis timeout) {
  if (!url.starts_with("http://"))
    return {FetchStatus::Failed, {}, "only http:// URLs are supported"};
  const auto path_start = url.find('/', 7);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);

  auto result = client.Get(path);
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
      return {FetchStatus::Timeout, {}, httplib::to_string(err)};
    return {FetchStatus::Failed, {}, httplib::to_string(err)};
  }
  if (result->status != 200)
    return {FetchStatus::Failed, {}, "HTTP status " + std::to_string(result->status)};
  return {FetchStatus::Ok, result->body, {}};
}

} // namespace electmap
