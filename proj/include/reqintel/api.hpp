#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reqintel/core.hpp"
#include "reqintel/service.hpp"

namespace reqintel {

/// Transport-neutral request; the HTTP server adapts to and from these.
struct ApiRequest {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

struct ApiErrorMapping {
  int status;
  std::string_view code;
};

/// The single (status, code) pair for each module error.
ApiErrorMapping api_error_for(ErrorCode code);

struct RouteInfo {
  std::string_view method;
  std::string_view pattern;
  bool mutating;
};

/// Every route served under /api/v1.
const std::vector<RouteInfo>& api_routes();

/// /api/v1 request handling. All bodies are JSON; every failure is an
/// {"error": {status, code, message}} object.
class ApiRouter {
 public:
  explicit ApiRouter(Service& service) : service_(service) {}

  ApiResponse handle(const ApiRequest& request);

 private:
  ApiResponse dispatch(const ApiRequest& request);

  Service& service_;
};

}  // namespace reqintel
