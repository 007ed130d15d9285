#include <httplib.h>

#include "reqintel/http.hpp"
#include "reqintel/service.hpp"

namespace reqintel {

std::vector<std::string> HttpConnector::fetch() {
  // Split "scheme://host[:port]/path?query" into the client base and path.
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::connector_failure, "bad url " + url_);
  const auto path_start = url_.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) {
    throw Error(ErrorCode::connector_failure, "GET " + url_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::connector_failure, "GET " + url_ + " returned " + std::to_string(res->status));
  }
  return split_record_lines(res->body);
}

std::unique_ptr<Connector> make_connector(const ConnectorConfig& c) {
  if (c.url) return std::make_unique<HttpConnector>(c.name, *c.url, c.kind);
  return make_file_connector(c);
}

}  // namespace reqintel
