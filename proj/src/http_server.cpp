#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>

#include "reqintel/http.hpp"
#include "reqintel/text.hpp"

namespace reqintel {

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw Error(ErrorCode::bad_config, "api.bind must be host:port");
  int port = 0;
  const char* first = bind.data() + colon + 1;
  const char* last = bind.data() + bind.size();
  auto [p, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || p != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::bad_config, "api.bind has a bad port: " + bind);
  }
  return {bind.substr(0, colon), port};
}

struct HttpServer::Impl {
  explicit Impl(Service& service) : router(service) {}

  void install() {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest api;
      api.method = req.method;
      api.path = req.path;
      for (const auto& [k, v] : req.params) api.query.emplace(k, v);
      for (const auto& [k, v] : req.headers) api.headers[to_lower(k)] = v;
      api.body = req.body;
      const ApiResponse out = router.handle(api);
      res.status = out.status;
      std::string content_type = "application/json";
      for (const auto& [k, v] : out.headers) {
        if (k == "Content-Type") {
          content_type = v;
        } else {
          res.set_header(k, v);
        }
      }
      if (!out.body.empty()) res.set_content(out.body, content_type);
    };
    const std::string any = R"(/.*)";
    server.Get(any, handler);
    server.Post(any, handler);
    server.Put(any, handler);
    server.Delete(any, handler);
    server.Patch(any, handler);
    server.Options(any, handler);
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });
  }

  ApiRouter router;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) { impl_->install(); }

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace reqintel
