#pragma once

#include <memory>
#include <string>

#include "reqintel/api.hpp"
#include "reqintel/config.hpp"
#include "reqintel/orchestrator.hpp"

namespace reqintel {

/// Splits "host:port"; throws Error(bad_config) on a malformed value.
std::pair<std::string, int> parse_bind(const std::string& bind);

/// Blocking HTTP server over an ApiRouter. stop() may be called from
/// another thread.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds and serves until stop(). Returns false if the bind failed.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port on host and returns it, or -1.
  int bind_any(const std::string& host);
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Fetches connector-format lines with an HTTP GET. Non-2xx responses and
/// transport errors raise Error(connector_failure).
class HttpConnector final : public Connector {
 public:
  HttpConnector(std::string name, std::string url, Source kind)
      : name_(std::move(name)), url_(std::move(url)), kind_(kind) {}

  const std::string& name() const override { return name_; }
  Source source_kind() const override { return kind_; }
  std::vector<std::string> fetch() override;

 private:
  std::string name_;
  std::string url_;
  Source kind_;
};

/// Connector factory handling both file and url connectors.
std::unique_ptr<Connector> make_connector(const ConnectorConfig& c);

}  // namespace reqintel
